use num_traits::Zero;
use serde::Serialize;

use super::{expected_dimension, Model, ModelDescription, Prediction};
use crate::expr::{format_rational, integer, rational, EvalPoint, Rational};
use crate::geometry::rank_at;
use crate::par::Execution;
use crate::qe_solver::solution_dimension;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub predicted: Prediction,
    pub computed: usize,
    /// `None` when the prediction is not covered.
    pub agree: Option<bool>,
    pub stabilized: bool,
}

/// Compare the predicted dimension with the solver at `p`.
pub fn crosscheck(model: &Model, mu: &Rational, p: &EvalPoint) -> Result<CrossCheck> {
    let space = solution_dimension(&model.manifold(), mu, p)?;
    let predicted = expected_dimension(model, mu);
    Ok(CrossCheck {
        predicted,
        computed: space.dim,
        agree: predicted.dim().map(|d| d == space.dim),
        stabilized: space.stabilized,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    #[serde(flatten)]
    pub model: ModelDescription,
    pub mu: String,
    pub dim: Option<usize>,
    pub predicted: Prediction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub violations: Vec<String>,
}

impl SweepReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Computed dimensions in row order, skipping failed cells.
    pub fn dims(&self) -> Vec<usize> {
        self.rows.iter().filter_map(|r| r.dim).collect()
    }
}

struct Cell {
    row: SweepRow,
    violations: Vec<String>,
}

fn run_cell(model: &Model, mu: &Rational) -> Cell {
    let mut row = SweepRow {
        model: model.describe(),
        mu: format_rational(mu),
        dim: None,
        predicted: expected_dimension(model, mu),
        error: None,
    };
    let label = format!("{} [{}] mu={}", row.model.family, row.model.params.join(","), row.mu);
    let mut violations = Vec::new();
    let p = model.default_basepoint();
    let space = match solution_dimension(&model.manifold(), mu, &p) {
        Ok(s) => s,
        Err(e) => {
            violations.push(format!("{label}: solver failed: {e}"));
            row.error = Some(e.to_string());
            return Cell { row, violations };
        }
    };
    let dim = space.dim;
    row.dim = Some(dim);
    let m = model.dim();
    if !space.stabilized {
        violations.push(format!("{label}: prolongation did not stabilize"));
    }
    if dim > m + 1 {
        violations.push(format!("{label}: dim {dim} exceeds m+1"));
    }
    if m == 2 && *mu == integer(-1) && dim == 2 {
        violations.push(format!("{label}: surface with dim E(-1) = 2"));
    }
    if matches!(model, Model::ExampleB2 { .. }) && *mu == rational(-1, 2) && dim == 3 {
        violations.push(format!("{label}: dim E(-1/2) = 3"));
    }
    if let Model::TypeA(_) = model {
        if !mu.is_zero() && *mu != integer(-1) {
            let EvalPoint::Exact(q) = &p else { unreachable!("catalog basepoints are exact") };
            let rank = rank_at(&model.manifold().ricci().rho, q).expect("constant tensor");
            let want = [3, 2, 0][rank];
            if dim != want {
                violations.push(format!("{label}: rank rho = {rank} but dim = {dim}"));
            }
        }
    }
    if let Some(want) = row.predicted.dim() {
        if want != dim {
            violations.push(format!("{label}: predicted {want}, computed {dim}"));
        }
    }
    Cell { row, violations }
}

/// Solve every (model, μ) cell and check the global properties:
/// `dim ≤ m + 1`, surfaces never have `dim E(−1) = 2`, the Type A rank
/// dichotomy away from `μ ∈ {0, −1}`, and agreement with every covered
/// prediction. Failing cells are recorded and the sweep continues.
pub fn sweep(models: &[Model], mus: &[Rational], exec: Execution) -> SweepReport {
    let cells: Vec<(Model, Rational)> =
        models.iter().flat_map(|m| mus.iter().map(move |mu| (m.clone(), mu.clone()))).collect();
    let results = exec.map(&cells, |(m, mu)| run_cell(m, mu));
    let mut report = SweepReport::default();
    for cell in results {
        report.rows.push(cell.row);
        report.violations.extend(cell.violations);
    }
    report
}
