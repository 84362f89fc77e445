//! Published benchmark configurations: four tables of expected lifetimes
//! and four systems whose mean residual life curves are plotted over
//! `t = 0..=30`.

use crate::distributions::DiscreteLifetime;
use crate::lifetime::expected_T;
use crate::orderstats::{os_mean, SystemSpec};
use crate::residual::{mrl_curve, Curve, CurveKind};
use crate::Result;

/// Error budget used for the tables.
pub const TABLE_D: f64 = 1e-4;
/// Error budget used for the figures.
pub const FIGURE_D: f64 = 1e-3;
/// Figure curves run over `t = 0..=FIGURE_T_MAX`.
pub const FIGURE_T_MAX: i64 = 30;

/// One printed row: component parameter, standby parameter, `n`, `k`,
/// `E T` and `E X_{n-k+1:n}` (four decimals).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub component: f64,
    pub standby: f64,
    pub n: usize,
    pub k: usize,
    pub expected_t: f64,
    pub expected_x: f64,
}

const SHAPES: [(usize, usize); 4] = [(3, 2), (5, 2), (5, 3), (10, 3)];

fn rows(component: f64, standby: [f64; 2], et: [[f64; 4]; 2], ex: [f64; 4]) -> Vec<TableRow> {
    let mut out = Vec::new();
    for (b, &g) in standby.iter().enumerate() {
        for (i, &(n, k)) in SHAPES.iter().enumerate() {
            out.push(TableRow { component, standby: g, n, k, expected_t: et[b][i], expected_x: ex[i] });
        }
    }
    out
}

/// Printed values of table `1..=4`.
pub fn table_rows(table: u8) -> Option<Vec<TableRow>> {
    Some(match table {
        // X_i ~ ge(p), Z ~ ge(g)
        1 => rows(
            0.25,
            [0.25, 0.10],
            [[3.8869, 5.4506, 3.2086, 5.4536], [4.8034, 6.3674, 3.6085, 5.8532]],
            [2.3977, 3.9608, 2.2213, 4.4672],
        ),
        // X_i ~ NB(2, p), Z ~ NB(2, g)
        2 => rows(
            0.25,
            [0.25, 0.10],
            [[8.2980, 10.5255, 7.1103, 10.2627], [9.5867, 11.7121, 7.5781, 10.6632]],
            [5.3781, 7.7281, 5.1947, 8.4974],
        ),
        // X_i ~ W(q, 2), Z ~ W(q_z, 2)
        3 => rows(
            0.75,
            [0.75, 0.90],
            [[1.6126, 1.9946, 1.4104, 1.9535], [1.7692, 2.1215, 1.4849, 2.0096]],
            [1.0971, 1.5390, 1.0857, 1.6935],
        ),
        // X_i ~ W(q, 2), Z ~ ge(g)
        4 => rows(
            0.75,
            [0.25, 0.10],
            [[1.6629, 2.0278, 1.4190, 1.9572], [1.8049, 2.1443, 1.4905, 2.0119]],
            [1.0971, 1.5390, 1.0857, 1.6935],
        ),
        _ => return None,
    })
}

/// Column names of the two distribution parameters of each table.
pub fn table_parameter_names(table: u8) -> (&'static str, &'static str) {
    match table {
        3 => ("q", "q_z"),
        4 => ("q", "g"),
        _ => ("p", "g"),
    }
}

/// The system behind a printed row.
pub fn table_system(table: u8, row: &TableRow) -> Result<SystemSpec> {
    let (x, z) = match table {
        1 => (DiscreteLifetime::geometric(row.component)?, DiscreteLifetime::geometric(row.standby)?),
        2 => (DiscreteLifetime::neg_binomial(2, row.component)?, DiscreteLifetime::neg_binomial(2, row.standby)?),
        3 => (DiscreteLifetime::discrete_weibull(row.component, 2.0)?, DiscreteLifetime::discrete_weibull(row.standby, 2.0)?),
        4 => (DiscreteLifetime::discrete_weibull(row.component, 2.0)?, DiscreteLifetime::geometric(row.standby)?),
        _ => return Err(crate::Error::InvalidArgs(format!("no table {table}"))),
    };
    SystemSpec::iid(row.n, row.k, x, z)
}

/// A row recomputed at [`TABLE_D`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputedRow {
    pub printed: TableRow,
    pub expected_t: f64,
    pub expected_x: f64,
}

pub fn compute_table(table: u8) -> Result<Vec<ComputedRow>> {
    let printed = table_rows(table).ok_or_else(|| crate::Error::InvalidArgs(format!("no table {table}")))?;
    printed
        .into_iter()
        .map(|row| {
            let sys = table_system(table, &row)?;
            let (et, _) = expected_T(&sys, TABLE_D)?;
            let (ex, _) = os_mean(sys.active(), sys.k(), TABLE_D)?;
            Ok(ComputedRow { printed: row, expected_t: et, expected_x: ex })
        })
        .collect()
}

/// The 2-out-of-4 systems of figures `1..=4`.
pub fn figure_system(figure: u8) -> Result<SystemSpec> {
    let ps = [1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0, 1.0 / 5.0];
    match figure {
        1 => SystemSpec::new(
            2,
            ps.iter().map(|&p| DiscreteLifetime::geometric(p)).collect::<Result<_>>()?,
            DiscreteLifetime::geometric(0.1)?,
        ),
        2 => SystemSpec::new(
            2,
            ps.iter().map(|&p| DiscreteLifetime::neg_binomial(2, p)).collect::<Result<_>>()?,
            DiscreteLifetime::neg_binomial(2, 0.1)?,
        ),
        3 => {
            let w = DiscreteLifetime::discrete_weibull((-0.01f64).exp(), 2.0)?;
            SystemSpec::iid(4, 2, w.clone(), w)
        }
        4 => {
            let w = DiscreteLifetime::discrete_weibull((-2.0f64).exp(), 0.5)?;
            SystemSpec::iid(4, 2, w.clone(), w)
        }
        _ => Err(crate::Error::InvalidArgs(format!("no figure {figure}"))),
    }
}

/// Usual, system-level and working MRL curves of a figure at [`FIGURE_D`].
pub fn compute_figure(figure: u8) -> Result<[Curve; 3]> {
    let sys = figure_system(figure)?;
    let ts: Vec<i64> = (0..=FIGURE_T_MAX).collect();
    Ok([
        mrl_curve(&sys, CurveKind::UsualMrl, &ts, FIGURE_D)?,
        mrl_curve(&sys, CurveKind::SystemLevelMrl, &ts, FIGURE_D)?,
        mrl_curve(&sys, CurveKind::WorkingMrl, &ts, FIGURE_D)?,
    ])
}
