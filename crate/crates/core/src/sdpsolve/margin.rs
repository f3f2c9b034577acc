use nalgebra::DMatrix;

use super::{
    solve, InfeasibilityKind, SdpError, SdpProblem, SdpSolution, Sense, SolveStatus, SolverOptions,
};

/// Result of [`feasibility_margin`].
#[derive(Clone, Debug)]
pub struct FeasibilityMargin {
    /// Largest `t` such that a feasible `X` has `X_j ⪰ t I` on the selected
    /// blocks. Infinite values come from solver certificates.
    pub margin: f64,
    /// Maximizing point `X` (empty when the margin is infinite).
    pub point: Vec<DMatrix<f64>>,
    /// Solution of the reduced problem in the shifted variable.
    pub solution: SdpSolution,
}

/// Feasibility margin of the constraint set `<A_i, X> = b_i`, `X ⪰ 0` with
/// the uniform shift applied to `slack_blocks`; unselected blocks are plain
/// PSD. The objective of `problem` is ignored.
///
/// Writing `X_j = Y_j + t I` on the selected blocks turns the problem into
/// `<A_i, Y> + c_i t = b_i` with `c_i = sum_j tr A_ij`; `t` is eliminated
/// through the row with largest `|c_i|`. If every `c_i` vanishes the margin
/// is unbounded or undefined and an error is returned.
pub fn feasibility_margin(
    problem: &SdpProblem,
    slack_blocks: &[usize],
    opts: &SolverOptions,
) -> Result<FeasibilityMargin, SdpError> {
    problem.validate()?;
    if !problem.dual_equalities.is_empty() {
        return Err(SdpError::InvalidProblem(
            "feasibility margin does not take dual equalities".into(),
        ));
    }
    if slack_blocks.iter().any(|&k| k >= problem.block_dims.len()) {
        return Err(SdpError::InvalidProblem("slack block out of range".into()));
    }
    let coeff: Vec<f64> = problem
        .constraints
        .iter()
        .map(|c| c.matrix.trace_on(slack_blocks))
        .collect();
    let scale = coeff.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    let Some(r) = (0..coeff.len()).max_by(|&a, &b| coeff[a].abs().total_cmp(&coeff[b].abs()))
    else {
        return Err(SdpError::UnboundedMargin("no constraints".into()));
    };
    if scale < 1e-14 {
        return Err(SdpError::UnboundedMargin(
            "no constraint involves the trace of the shifted blocks".into(),
        ));
    }
    let cr = coeff[r];
    let ar = &problem.constraints[r].matrix;
    let br = problem.constraints[r].rhs;
    let mut reduced = SdpProblem::new(problem.block_dims.clone(), Sense::Minimize)
        .with_objective(ar.scaled(1.0 / cr));
    for (i, c) in problem.constraints.iter().enumerate() {
        if i == r {
            continue;
        }
        let ratio = coeff[i] / cr;
        let a = if ratio == 0.0 {
            c.matrix.clone()
        } else {
            c.matrix.axpy(-ratio, ar)
        };
        reduced.add_constraint(a, c.rhs - ratio * br);
    }
    let solution = solve(&reduced, opts)?;
    let margin = match solution.status {
        SolveStatus::Optimal => br / cr - solution.objective_value,
        // no Y at all: the original set is empty for every t
        SolveStatus::InfeasibleCertificate(InfeasibilityKind::Primal) => f64::NEG_INFINITY,
        SolveStatus::InfeasibleCertificate(InfeasibilityKind::Dual) => f64::INFINITY,
        SolveStatus::MaxIterations => {
            if solution.kkt.max() > 1e-6 {
                return Err(SdpError::NumericalFailure(format!(
                    "no convergence after {} iterations (residuals {:?})",
                    solution.iterations, solution.kkt
                )));
            }
            br / cr - solution.objective_value
        }
    };
    let point = if margin.is_finite() {
        let mut x = solution.primal_blocks.clone();
        for &k in slack_blocks {
            for i in 0..x[k].nrows() {
                x[k][(i, i)] += margin;
            }
        }
        x
    } else {
        Vec::new()
    };
    Ok(FeasibilityMargin {
        margin,
        point,
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdpsolve::BlockSparse;

    fn single_block_problem(n: usize, cons: Vec<(BlockSparse, f64)>) -> SdpProblem {
        let mut p = SdpProblem::new(vec![n], Sense::Minimize);
        for (a, b) in cons {
            p.add_constraint(a, b);
        }
        p
    }

    fn e(i: usize, j: usize, v: f64) -> BlockSparse {
        let mut m = BlockSparse::new();
        m.push(0, i, j, v);
        m
    }

    #[test]
    fn unit_trace_margin() {
        // tr X = 1 on 2x2: X = I/2 gives t = 1/2
        let p = single_block_problem(2, vec![(BlockSparse::identity(0, 2), 1.0)]);
        let out = feasibility_margin(&p, &[0], &SolverOptions::default()).unwrap();
        assert!((out.margin - 0.5).abs() < 1e-7);
        assert!((out.point[0][(0, 0)] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn forced_negative_entry() {
        // X = diag(1, -1) forced: margin -1
        let p = single_block_problem(
            2,
            vec![
                (e(0, 0, 1.0), 1.0),
                (e(1, 1, 1.0), -1.0),
                (e(0, 1, 1.0), 0.0),
            ],
        );
        let out = feasibility_margin(&p, &[0], &SolverOptions::default()).unwrap();
        assert!((out.margin + 1.0).abs() < 1e-7, "{}", out.margin);
    }

    #[test]
    fn no_trace_coupling_is_unbounded() {
        let p = single_block_problem(2, vec![(e(0, 1, 1.0), 0.3)]);
        assert!(matches!(
            feasibility_margin(&p, &[0], &SolverOptions::default()),
            Err(SdpError::UnboundedMargin(_))
        ));
    }
}
