pub mod config;
pub mod harness;
pub mod lin_model;
pub mod mpc;
pub mod noise;
pub mod plant;
pub mod series;
