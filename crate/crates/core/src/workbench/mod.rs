//! Command-line front end: configuration loading, scenario presets, the five
//! commands and all file output.

pub mod commands;
pub mod config;
pub mod format;
pub mod io;
pub mod presets;

pub use commands::{
    cmd_fit, cmd_invert, cmd_paper_tables, cmd_simulate, cmd_sweep, resolve_config_arg,
    InvertOutcome, InvertQuery, PaperTablesReport, SimulateOutcome,
};
pub use config::{load_config, OutputFormat, ResolvedConfig, RunConfig, SCHEMA_VERSION};
pub use format::fmt_sig9;
pub use presets::{
    builtin_config, paper_default_config, scenario_preset, ScenarioPreset, GINI_ABS_TOL,
    TR_REL_TOL,
};
