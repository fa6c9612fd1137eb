//! Stream ensembles: least-squares weighted GOOWE-ML and the online bagging
//! baselines.

mod adwin;
mod adwin_bag;
mod goowe;
mod oza;
mod solver;

pub use adwin::{Adwin, AdwinConfig, CutBound};
pub use adwin_bag::AdwinBag;
pub use goowe::{Goowe, GooweConfig};
pub use oza::{poisson_one, OzaBag};
pub use solver::{solve_weights, weighted_vote, SolveMethod, SquareMatrix, WeightAccumulator, WeightSolution};

use crate::transforms::{MultiLabelLearner, Transform, TransformFactory};

/// Builds fresh, untrained ensemble members.
pub trait ComponentFactory {
    type Model: MultiLabelLearner + Clone + std::fmt::Debug;

    fn label_count(&self) -> usize;

    /// `seed` drives any randomized structure of the new member.
    fn build(&self, seed: u64) -> Self::Model;
}

impl ComponentFactory for TransformFactory {
    type Model = Transform;

    fn label_count(&self) -> usize {
        self.labels
    }

    fn build(&self, seed: u64) -> Transform {
        TransformFactory::build(self, seed)
    }
}
