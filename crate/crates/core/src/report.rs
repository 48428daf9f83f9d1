//! Solve outcome summary attached to grid solves and CLI output.

/// Summary of a completed solve.
#[derive(Debug, Clone, Default)]
pub struct SolveReport {
    /// Final energy of the accepted iterate.
    pub energy: f64,
    /// Sup of the discrete Euler-Lagrange residual over the safely
    /// spacelike cells (|grad phi| <= 1 - eps_report), in density units.
    pub el_residual_sup: f64,
    /// Largest gradient magnitude over all cells.
    pub max_grad: f64,
    /// Newton iterations (grid) or fixed-point iterations (coupled solves).
    pub iterations: usize,
    /// Quadrature evaluations or cells summed.
    pub quadrature_points: usize,
    /// Free-form diagnostics accumulated during the solve.
    pub wall_notes: String,
    /// Continuation trace of the grid solver: (theta, stage energy) per
    /// stage, nondecreasing toward the exact energy.
    pub stage_energies: Vec<(f64, f64)>,
}

impl SolveReport {
    pub fn note(&mut self, msg: impl AsRef<str>) {
        if !self.wall_notes.is_empty() {
            self.wall_notes.push_str("; ");
        }
        self.wall_notes.push_str(msg.as_ref());
    }
}
