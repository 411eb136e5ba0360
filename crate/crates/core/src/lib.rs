pub mod artifact;
pub mod belief;
pub mod error;
pub mod eval;
pub mod ltlf;
pub mod model;
pub mod planner;
pub mod propagate;
pub mod scenarios;
pub mod tree;
