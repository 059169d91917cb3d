use serde::Serialize;

pub const EXIT_OK: i32 = 0;
/// A scenario whose verdict differed from the scripted expectation.
pub const EXIT_SCENARIO_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REJECT: i32 = 3;
pub const EXIT_STATE: i32 = 4;

/// Printed to stderr as one JSON object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub error: String,
    pub message: String,
    #[serde(skip)]
    exit: i32,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { error: "Usage".into(), message: message.into(), exit: EXIT_USAGE }
    }

    pub fn state(error: impl Into<String>, message: impl Into<String>) -> Self {
        Self { error: error.into(), message: message.into(), exit: EXIT_STATE }
    }

    pub fn io(what: &str, e: impl std::fmt::Display) -> Self {
        Self::state("Io", format!("{what}: {e}"))
    }

    pub fn exit_code(&self) -> i32 {
        self.exit
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.error, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<eid_core::card::CardError> for CliError {
    fn from(e: eid_core::card::CardError) -> Self {
        Self::state(format!("{e:?}"), e.to_string())
    }
}

impl From<eid_core::authority::AuthorityError> for CliError {
    fn from(e: eid_core::authority::AuthorityError) -> Self {
        use eid_core::authority::AuthorityError::*;
        let code = match &e {
            RequestRejected(_) => "RequestRejected",
            UnknownOrAlreadyRevoked(_) => "UnknownOrAlreadyRevoked",
            LedgerCorrupt(_) => "LedgerCorrupt",
            InvalidPolicy(_) => "InvalidPolicy",
            Io(_) => "Io",
        };
        Self::state(code, e.to_string())
    }
}

impl From<eid_core::verifier::TrustError> for CliError {
    fn from(e: eid_core::verifier::TrustError) -> Self {
        Self::state("TrustStore", e.to_string())
    }
}

impl From<eid_core::card::CardFileError> for CliError {
    fn from(e: eid_core::card::CardFileError) -> Self {
        Self::state("CardFile", e.to_string())
    }
}

impl From<eid_core::biometrics::BiometricError> for CliError {
    fn from(e: eid_core::biometrics::BiometricError) -> Self {
        Self::usage(e.to_string())
    }
}
