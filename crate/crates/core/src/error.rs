use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain { function: &'static str, detail: String },
    #[error("range error in {function}: {detail}")]
    Range { function: &'static str, detail: String },
    #[error("invalid model `{model}`: {detail}")]
    InvalidModel { model: String, detail: String },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("integrand returned NaN at x = {at}")]
    NanIntegrand { at: f64 },
    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { function, detail: detail.into() }
    }

    pub(crate) fn model(model: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::InvalidModel { model: model.into(), detail: detail.into() }
    }
}
