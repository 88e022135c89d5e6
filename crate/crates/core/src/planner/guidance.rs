/// Weights that steer lead computation and high-level state selection.
pub trait GuidancePolicy {
    /// Cost of entering a product state whose centre is `dist` away.
    fn edge_weight(&self, dist: f64, nsel: u32) -> f64;
    /// Starting cost of a lead from a product state that already holds tree nodes.
    fn source_cost(&self, nsel: u32) -> f64;
    /// Relative probability of selecting a lead state.
    fn selection_weight(&self, nsel: u32) -> f64;
}

/// Selection weight `1 / (1 + nsel)^2`; leads avoid states that have been
/// selected often.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseSquareGuidance {
    pub edge_penalty: f64,
    pub source_penalty: f64,
}

impl Default for InverseSquareGuidance {
    fn default() -> Self {
        InverseSquareGuidance {
            edge_penalty: 0.05,
            source_penalty: 0.02,
        }
    }
}

impl GuidancePolicy for InverseSquareGuidance {
    fn edge_weight(&self, dist: f64, nsel: u32) -> f64 {
        dist * (1.0 + self.edge_penalty * f64::from(nsel))
    }

    fn source_cost(&self, nsel: u32) -> f64 {
        self.source_penalty * f64::from(nsel)
    }

    fn selection_weight(&self, nsel: u32) -> f64 {
        let d = 1.0 + f64::from(nsel);
        1.0 / (d * d)
    }
}
