//! Reproduction tables: reference value, computed value and absolute delta.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use monty_core::stats::{find_extrema, strategy_expectation, surface_scan, Method, Quantity};
use monty_core::{GameModel, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub extremum: &'static str,
    pub phi1: f64,
    pub phi2: f64,
    pub target: f64,
    pub computed: f64,
}

impl TableRow {
    pub fn delta(&self) -> f64 {
        (self.computed - self.target).abs()
    }
}

fn value_at(
    quantity: Quantity,
    entangled: bool,
    phi1: f64,
    phi2: f64,
    nodes: usize,
) -> Result<f64> {
    let model = GameModel::new(entangled, Default::default());
    let e = strategy_expectation(phi1, phi2, &model, &Method::Quadrature { nodes })?;
    Ok(match quantity {
        Quantity::Stay => e.stay.value,
        Quantity::Switch => e.switch.value,
        Quantity::Imbalance => e.imbalance.value,
    })
}

fn row(
    label: &str,
    extremum: &'static str,
    quantity: Quantity,
    entangled: bool,
    (phi1, phi2): (f64, f64),
    target: f64,
    nodes: usize,
) -> Result<TableRow> {
    Ok(TableRow {
        label: label.to_string(),
        extremum,
        phi1,
        phi2,
        target,
        computed: value_at(quantity, entangled, phi1, phi2, nodes)?,
    })
}

/// Strategy expectation extrema at their tabulated door angles.
pub fn table_two(nodes: usize) -> Result<Vec<TableRow>> {
    let (z, h) = (0.0, FRAC_PI_2);
    [
        ("<P_s>", "min", Quantity::Switch, false, (h, h), 0.5908),
        ("<P_s>", "max", Quantity::Switch, false, (z, h), 0.75),
        ("<P_ns>", "min", Quantity::Stay, false, (z, h), 0.25),
        ("<P_ns>", "max", Quantity::Stay, false, (z, z), 0.4092),
        ("<P_e,s>", "min", Quantity::Switch, true, (h, h), 0.4003),
        ("<P_e,s>", "max", Quantity::Switch, true, (z, h), 0.6487),
        ("<P_e,ns>", "min", Quantity::Stay, true, (z, h), 0.3513),
        ("<P_e,ns>", "max", Quantity::Stay, true, (z, z), 0.5997),
    ]
    .into_iter()
    .map(|(label, ext, q, e, at, target)| row(label, ext, q, e, at, target, nodes))
    .collect()
}

/// Imbalance extrema. The entangled minimum is searched on a grid of spacing
/// `step` and reported where it was found.
pub fn table_three(nodes: usize, step: f64) -> Result<Vec<TableRow>> {
    let (z, h) = (0.0, FRAC_PI_2);
    let mut rows = vec![
        row(
            "P_abs",
            "min",
            Quantity::Imbalance,
            false,
            (h, h),
            0.1817,
            nodes,
        )?,
        row(
            "P_abs",
            "max",
            Quantity::Imbalance,
            false,
            (z, h),
            0.5,
            nodes,
        )?,
    ];
    let grid = surface_scan(step, &GameModel::new(true, Default::default()), nodes)?;
    let (_, min) = find_extrema(&grid, Quantity::Imbalance, None).expect("non-empty surface");
    rows.push(TableRow {
        label: "P_e,abs".into(),
        extremum: "min",
        phi1: min.phi1,
        phi2: min.phi2,
        target: 0.0001,
        computed: min.value,
    });
    rows.push(row(
        "P_e,abs",
        "max",
        Quantity::Imbalance,
        true,
        (z, h),
        0.2973,
        nodes,
    )?);
    Ok(rows)
}

/// Default grid for the entangled imbalance minimum.
pub const TABLE_THREE_STEP: f64 = PI / 20.0;

pub fn render(rows: &[TableRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:<4} {:>9} {:>9} {:>9} {:>10} {:>9}",
        "quantity", "", "phi1", "phi2", "target", "computed", "delta"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<10} {:<4} {:>9.6} {:>9.6} {:>9.4} {:>10.6} {:>9.2e}",
            r.label,
            r.extremum,
            r.phi1,
            r.phi2,
            r.target,
            r.computed,
            r.delta()
        );
    }
    out
}
