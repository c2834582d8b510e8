use std::fmt;

/// Command failure tagged with the stage that produced it.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Resolve(String),
    Derive(String),
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Resolve(_) => 4,
            CliError::Derive(_) => 5,
            CliError::Output(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Parse(m) => write!(f, "parse: {m}"),
            CliError::Resolve(m) => write!(f, "resolve: {m}"),
            CliError::Derive(m) => write!(f, "derive: {m}"),
            CliError::Output(m) => write!(f, "output: {m}"),
        }
    }
}
