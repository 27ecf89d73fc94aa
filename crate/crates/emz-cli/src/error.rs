use std::fmt;

/// Exit-code-bearing error: configuration problems exit with 2, numerical
/// or runtime failures with 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Run(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Run(msg) => write!(f, "run failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

macro_rules! run_error_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Run(e.to_string())
            }
        })*
    };
}

run_error_from!(
    std::io::Error,
    poly_algebra::PolyError,
    fp_kernel::FpError,
    mc_sim::McError,
    gle_rom::GleError,
    dd_kernel::DdError
);
