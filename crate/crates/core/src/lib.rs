//! Fatigue life prediction for aircraft wing structures.
//!
//! The crate models the classical fatigue damage assessment chain as a
//! three-stage regression pipeline over mission flight parameters:
//!
//! 1. stress prediction per principal structural element (PSE) and mission
//!    segment (per-PSE quadratic fit for ground segments, one shared MLP for
//!    flight segments),
//! 2. per-flight damage prediction for the ground-air-ground cycle and for
//!    gust/maneuver cycles (two MLPs on time-averaged stresses),
//! 3. fatigue life in flights-to-failure via linear damage accumulation.
//!
//! A deterministic physics surrogate ([`oracle`]) generates missions,
//! stresses, load cycles and damage labels so the whole pipeline can be
//! trained, evaluated and audited without proprietary flight data. The
//! [`stats`] module supplies the certification layer: error summaries,
//! rank correlations, two-sample tests, bootstrap prediction intervals and
//! a train/test proximity audit.

pub mod commands;
pub mod domain;
pub mod error;
pub mod io;
pub mod nn;
pub mod oracle;
pub mod phase1;
pub mod phase2;
pub mod phase3;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
