//! Config-driven experiment harness: scenario documents, the replicate
//! runner, CSV emission and the real-data protocol.

mod realdata;
mod records;
mod runner;
mod scenario;

pub use realdata::{run_realdata, RealDataOutcome, RealDataRecord};
pub use records::{emit_csv, emit_plotdata, ExperimentRecord, CSV_HEADER};
pub use runner::{fig1_model, run_oracle_curve, run_scenario, OraclePoint, RunOptions};
pub use scenario::{ColumnFilter, LoadingKind, RealDataPlan, Scenario, ScenarioDoc};
