//! Operational shell around the tournament ranking engine: group file and
//! match log serialization, layered configuration, the `arena-rank`
//! command line, and the HTTP reward service.

pub mod commands;
pub mod config;
pub mod io;
pub mod service;
