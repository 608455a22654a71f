//! The two reference tables, recomputed from the grids and order lists.

use std::process::ExitCode;

use anyhow::Result;
use qac_core::distance_analysis::{exact_distance, DistanceReport, Method};
use qac_core::qac_code::{dim_footprint, dim_formula};
use qac_core::{CodeSpec, EvaluationGrid, FiniteField};
use serde::Serialize;

struct TableDef {
    title: &'static str,
    field: &'static str,
    degrees: &'static [u32],
    delta: u32,
    s: usize,
    orders: &'static [u32],
}

const TABLES: [TableDef; 2] = [
    TableDef {
        title: "F_7 x F_49",
        field: "7^2",
        degrees: &[1, 2],
        delta: 25,
        s: 2,
        orders: &[4, 5, 10, 15, 20, 25, 26, 27, 28, 29, 30],
    },
    TableDef {
        title: "F_5 x F_25 x F_25",
        field: "5^2",
        degrees: &[1, 2, 2],
        delta: 4,
        s: 1,
        orders: &[2, 3, 24, 25, 26, 27, 47, 48, 49],
    },
];

#[derive(Serialize)]
struct Column {
    d: u32,
    kappa: usize,
    v: u64,
    exact: Option<u64>,
    lower: u64,
    upper: i64,
    method: Method,
}

#[derive(Serialize)]
struct Table {
    title: &'static str,
    delta: u32,
    s: usize,
    m: usize,
    r: u32,
    d_tilde: u32,
    columns: Vec<Column>,
}

impl Column {
    fn new(spec: &CodeSpec, report: &DistanceReport) -> Self {
        Column {
            d: spec.d(),
            kappa: report.kappa,
            v: report.cartesian,
            exact: report.exact,
            lower: report.lower,
            upper: report.upper,
            method: report.method,
        }
    }

    fn w(&self) -> String {
        match self.exact {
            Some(w) => w.to_string(),
            None => format!("≥{}", self.lower),
        }
    }

    /// Cross-checks between independently computed quantities.
    fn problems(&self, spec: &CodeSpec) -> Vec<String> {
        let mut out = Vec::new();
        if dim_formula(spec) != self.kappa as u64 {
            out.push(format!("d={}: footprint and formula dimensions differ", self.d));
        }
        let lo = self.exact.unwrap_or(self.lower);
        if lo < self.v || lo as i64 > self.upper {
            out.push(format!(
                "d={}: distance {} outside [{}, {}]",
                self.d, lo, self.v, self.upper
            ));
        }
        out
    }
}

fn build(def: &TableDef, problems: &mut Vec<String>) -> Result<Table> {
    let field = FiniteField::from_spec(def.field)?;
    let grid = EvaluationGrid::from_subfield_degrees(&field, def.degrees)?;
    let base = CodeSpec::new(grid, def.orders[0], def.delta, def.s)?;
    let mut columns = Vec::new();
    for &d in def.orders {
        let spec = base.with_d(d);
        let report = exact_distance(&spec)?;
        debug_assert_eq!(report.kappa, dim_footprint(&spec));
        let col = Column::new(&spec, &report);
        problems.extend(col.problems(&spec));
        columns.push(col);
    }
    Ok(Table {
        title: def.title,
        delta: def.delta,
        s: def.s,
        m: base.m(),
        r: base.r(),
        d_tilde: base.d_tilde(),
        columns,
    })
}

fn render(t: &Table) -> String {
    let rows: [(&str, Vec<String>); 5] = [
        ("d", t.columns.iter().map(|c| c.d.to_string()).collect()),
        ("kappa", t.columns.iter().map(|c| c.kappa.to_string()).collect()),
        ("v", t.columns.iter().map(|c| c.v.to_string()).collect()),
        ("w", t.columns.iter().map(Column::w).collect()),
        ("N", t.columns.iter().map(|c| c.upper.to_string()).collect()),
    ];
    let width = rows
        .iter()
        .flat_map(|(_, cells)| cells.iter().map(|c| c.chars().count()))
        .max()
        .unwrap_or(0);
    let mut out = format!(
        "{}  (m = {}, delta = {}, s = {}, r = {}, d_tilde = {})\n",
        t.title, t.m, t.delta, t.s, t.r, t.d_tilde
    );
    for (label, cells) in rows {
        out.push_str(&format!("{label:<5}"));
        for c in cells {
            let pad = width - c.chars().count();
            out.push_str(&format!(" {}{}", " ".repeat(pad), c));
        }
        out.push('\n');
    }
    out
}

pub fn run(as_json: bool) -> Result<ExitCode> {
    let mut problems = Vec::new();
    let tables = TABLES
        .iter()
        .map(|def| build(def, &mut problems))
        .collect::<Result<Vec<_>>>()?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&tables)?);
    } else {
        let text: Vec<String> = tables.iter().map(render).collect();
        print!("{}", text.join("\n"));
    }
    for p in &problems {
        eprintln!("inconsistent: {p}");
    }
    Ok(if problems.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
