#![allow(dead_code)]

pub mod bayes;
pub mod fixtures;
pub mod ltlf_eval;
pub mod trees;
