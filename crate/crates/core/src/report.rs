//! Plain-text reports: named checks, CSV-like tables and a summary block.
//!
//! ```text
//! # <title>
//! [checks]
//! property,measured,relation,bound,status
//! ...
//! [table <name>]
//! <header>
//! <rows>
//! [summary]
//! checks=<n> passed=<p> failed=<f> reported=<r>
//! status=PASS|FAIL
//! ```
//!
//! Numbers are written with a fixed exponent format so that reruns with the
//! same inputs produce identical bytes.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `measured <= bound`.
    AtMost,
    /// `measured > bound`.
    Above,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Above => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    /// Name of the property in words.
    pub property: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
    /// Reported checks are recorded but never fail the report.
    pub asserted: bool,
}

impl Check {
    pub fn holds(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.measured <= self.bound,
            Relation::Above => self.measured > self.bound,
        }
    }

    pub fn status(&self) -> &'static str {
        match (self.asserted, self.holds()) {
            (false, _) => "REPORT",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

/// Fixed-format rendering of a float.
pub fn num(v: f64) -> String {
    format!("{v:.12e}")
}

/// Renders a vector as `a;b;c` so it stays inside one CSV cell.
pub fn vec_cell(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Report::default()
        }
    }

    /// Adds an asserted check `measured <= bound`.
    pub fn at_most(&mut self, property: &str, measured: f64, bound: f64) {
        self.push_check(property, measured, Relation::AtMost, bound, true);
    }

    /// Adds an asserted check `measured > bound`.
    pub fn above(&mut self, property: &str, measured: f64, bound: f64) {
        self.push_check(property, measured, Relation::Above, bound, true);
    }

    /// Records a value without asserting anything about it.
    pub fn record(&mut self, property: &str, measured: f64, bound: f64) {
        self.push_check(property, measured, Relation::AtMost, bound, false);
    }

    fn push_check(&mut self, property: &str, measured: f64, relation: Relation, bound: f64, asserted: bool) {
        self.checks.push(Check {
            property: property.to_string(),
            measured,
            relation,
            bound,
            asserted,
        });
    }

    pub fn add_table(&mut self, table: Table) {
        self.tables.push(table);
    }

    /// Appends the checks and tables of `other`, prefixing property names.
    pub fn merge(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.property = format!("{prefix}: {}", c.property);
            self.checks.push(c);
        }
        for mut t in other.tables {
            t.name = format!("{prefix}: {}", t.name);
            self.tables.push(t);
        }
    }

    /// Asserted checks that failed.
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.asserted && !c.holds())
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.title);
        let _ = writeln!(s, "[checks]");
        let _ = writeln!(s, "property,measured,relation,bound,status");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                c.property,
                num(c.measured),
                c.relation.symbol(),
                num(c.bound),
                c.status()
            );
        }
        for t in &self.tables {
            let _ = writeln!(s, "[table {}]", t.name);
            let _ = writeln!(s, "{}", t.header.join(","));
            for r in &t.rows {
                let _ = writeln!(s, "{}", r.join(","));
            }
        }
        let asserted = self.checks.iter().filter(|c| c.asserted).count();
        let failed = self.failures().count();
        let _ = writeln!(s, "[summary]");
        let _ = writeln!(
            s,
            "checks={} passed={} failed={} reported={}",
            asserted,
            asserted - failed,
            failed,
            self.checks.len() - asserted
        );
        let _ = writeln!(s, "status={}", if failed == 0 { "PASS" } else { "FAIL" });
        s
    }
}
