use thiserror::Error;

/// Errors surfaced by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter for {what}: {detail}")]
    InvalidParameter { what: &'static str, detail: String },

    #[error("profile has {got} decisions but the game has {expected} users")]
    ProfileLength { expected: usize, got: usize },

    #[error("user {user} plays strategy {strategy} but the game has only {num_aps} APs")]
    StrategyOutOfRange {
        user: usize,
        strategy: usize,
        num_aps: usize,
    },

    #[error("user {user} computes locally in this profile")]
    NotAnOffloader { user: usize },

    #[error("user {user} does not offload via AP {ap} in this profile")]
    InconsistentQuery { user: usize, ap: usize },

    #[error("operation requires the {expected} cloud model")]
    WrongModel { expected: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance has {profiles} strategy profiles, enumeration cap is {cap}")]
    InstanceTooLarge { profiles: u128, cap: u64 },

    #[error("scenario config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
