//! `atfmrisk synth`: write a seeded synthetic scenario directory.

use atfmrisk::synth::{generate, ScenarioParams};

use super::input_err;
use crate::report::RunReport;
use crate::{CliError, SynthArgs};

pub fn run(args: &SynthArgs) -> Result<(), CliError> {
    let mut report = RunReport::new("synth");
    let mut params = match &args.params {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<ScenarioParams>(&text)
                .map_err(|e| input_err(format!("{}: {e}", path.display())))?
        }
        None => ScenarioParams::default(),
    };
    params.seed = args.seed;

    let scenario = generate(&params).map_err(input_err)?;
    report.stage_done("generate");
    scenario
        .write_to_dir(&args.out)
        .map_err(|e| input_err(format!("{}: {e}", args.out.display())))?;
    report.stage_done("write");

    println!(
        "wrote scenario to {}: {} sectors, {} regulations, {} flights ({} delayed), horizon {}",
        args.out.display(),
        params.n_sectors,
        params.n_regulations,
        params.n_flights,
        scenario.manifest.n_delayed_flights,
        scenario.manifest.horizon_label,
    );
    report.finish();
    Ok(())
}
