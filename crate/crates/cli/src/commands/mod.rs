mod combinatorics;
mod majorant;
mod profile;
mod sharpness;
mod spectral;
mod timejet;

use gevrey_core::data_factory::gevrey_jet;
use gevrey_core::timejet::{budget_for, time_jet, TimeJet};
use gevrey_core::{parse_pde, Jet2, NumericMode, PdeModel, Sigma};

use crate::args::Command;
use crate::config::{resolve, CommonConfig, FileConfig, ModelConfig};
use crate::error::CliError;
use crate::report::Reporter;

pub use combinatorics::run as combinatorics;
pub use majorant::run as majorant;
pub use profile::run as profile;
pub use sharpness::run as sharpness;
pub use spectral::run as spectral;
pub use timejet::run as timejet;

/// What a command leaves behind: whether its verdicts held and where it wrote.
pub struct Outcome {
    pub passed: bool,
    pub lines: Vec<String>,
    pub reporter: Reporter,
}

pub fn dispatch(
    common: CommonConfig,
    file: &FileConfig,
    command: &Command,
) -> Result<Outcome, CliError> {
    let name = command.name();
    let section = file.section(name)?;
    match command {
        Command::Timejet(a) => timejet(common, resolve(section, a, name)?),
        Command::Sharpness(a) => sharpness(common, resolve(section, a, name)?),
        Command::Majorant(a) => majorant(common, resolve(section, a, name)?),
        Command::Combinatorics(a) => combinatorics(common, resolve(section, a, name)?),
        Command::Spectral(a) => spectral(common, resolve(section, a, name)?),
        Command::Profile(a) => profile(common, resolve(section, a, name)?),
    }
}

pub(crate) fn build_model(cfg: &ModelConfig) -> Result<PdeModel, CliError> {
    match cfg.model.trim() {
        "kp1_5" => Ok(PdeModel::kp1_5(cfg.alpha_c.rational("alpha_c")?)),
        "kawahara" => Ok(PdeModel::kawahara(
            cfg.beta.rational("beta")?,
            cfg.delta.rational("delta")?,
        )?),
        text => Ok(parse_pde(text)?),
    }
}

/// Prescribed data `d_x^n phi(0,0) = (n!)^σ` sized for `j_max` levels, and its staircase.
pub(crate) fn prescribed_staircase(
    model: &PdeModel,
    sigma: &Sigma,
    mode: NumericMode,
    j_max: usize,
    nx_out: usize,
    ny_out: usize,
) -> Result<(Jet2, TimeJet), CliError> {
    let (nx, ny) = budget_for(model, j_max, nx_out, ny_out);
    let phi = gevrey_jet(sigma, nx, ny, mode).map_err(|e| CliError::Usage(e.to_string()))?;
    let tj = time_jet(model, &phi, j_max).map_err(CliError::numeric)?;
    Ok((phi, tj))
}
