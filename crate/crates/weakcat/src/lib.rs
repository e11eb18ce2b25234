//! Scenario files, reports and the `weakcat` command line on top of
//! [`weakcat_core`].

pub mod builtins;
pub mod cli;
pub mod report;
pub mod sdl;
