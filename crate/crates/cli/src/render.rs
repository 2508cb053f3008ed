use std::io::Write;

use serde::Serialize;
use stabkit_core::{Certificate, Element, Rational, ScanReport, SearchResult};

use crate::CliError;

const HEADER: [&str; 5] = ["kind", "r", "value", "x", "y"];

pub fn opt(v: &Option<Rational>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn pair(p: Option<&(Element, Element)>) -> [String; 2] {
    p.map(|(x, y)| [x.to_string(), y.to_string()]).unwrap_or_default()
}

pub fn json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(CliError::failed)?;
    writeln!(out).map_err(CliError::failed)
}

struct Rows<'a> {
    w: csv::Writer<&'a mut dyn Write>,
}

impl<'a> Rows<'a> {
    fn new(out: &'a mut dyn Write) -> Result<Self, CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER).map_err(CliError::failed)?;
        Ok(Rows { w })
    }

    fn row(&mut self, kind: &str, r: String, value: String, [x, y]: [String; 2]) -> Result<(), CliError> {
        self.w.write_record([kind, &r, &value, &x, &y]).map_err(CliError::failed)
    }

    fn finish(mut self) -> Result<(), CliError> {
        self.w.flush().map_err(CliError::failed)
    }
}

/// `max` row, then one `shell` row per bound.
pub fn scan_csv(report: &ScanReport, out: &mut dyn Write) -> Result<(), CliError> {
    let mut rows = Rows::new(out)?;
    rows.row("max", String::new(), report.max_defect.to_string(), pair(Some(&report.argmax)))?;
    for e in &report.shell_profile {
        rows.row("shell", e.r.to_string(), opt(&e.sup), pair(e.argmax.as_ref()))?;
    }
    rows.finish()
}

/// One `term` row per chain term, then `bound` and `defect` at `(x, y)`.
pub fn certificate_csv(cert: &Certificate, out: &mut dyn Write) -> Result<(), CliError> {
    let mut rows = Rows::new(out)?;
    let (r, terms, bound, defect, x, y): (_, Vec<(&Rational, &Element, &Element)>, _, _, _, _) = match cert {
        Certificate::Cauchy(c) => {
            (&c.budget.r, c.terms.iter().map(|t| (&t.value, &t.left, &t.right)).collect(), &c.bound, &c.defect, &c.x, &c.y)
        }
        Certificate::Jensen(c) => {
            (&c.budget.r, c.terms.iter().map(|t| (&t.value, &t.left, &t.right)).collect(), &c.bound, &c.defect, &c.x, &c.y)
        }
        Certificate::Hyper(c) => {
            (&c.budget.r, c.terms.iter().map(|t| (&t.value, &t.left, &t.right)).collect(), &c.bound, &c.defect, &c.x, &c.y)
        }
    };
    for (value, left, right) in terms {
        rows.row("term", r.to_string(), value.to_string(), [left.to_string(), right.to_string()])?;
    }
    let xy = [x.to_string(), y.to_string()];
    rows.row("bound", r.to_string(), bound.to_string(), xy.clone())?;
    rows.row("defect", String::new(), defect.to_string(), xy)?;
    rows.finish()
}

/// `best`, `shell` and `ceiling` rows.
pub fn search_csv(result: &SearchResult, out: &mut dyn Write) -> Result<(), CliError> {
    let mut rows = Rows::new(out)?;
    rows.row("best", String::new(), result.best_sup.to_string(), pair(Some(&result.argmax)))?;
    rows.row("shell", result.shell_bound.to_string(), result.shell_sup.to_string(), Default::default())?;
    rows.row("ceiling", String::new(), result.ceiling.to_string(), Default::default())?;
    rows.finish()
}
