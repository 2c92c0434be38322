use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("polyhedron is empty")]
    EmptyPolyhedron,

    #[error("point {point} does not belong to {set}")]
    NotInSet { point: String, set: String },

    #[error("face difference requires the second face to lie in the first")]
    NotNested,

    #[error("direction {0} is not tangent to the graph of the normal-cone map")]
    NotTangent(String),

    #[error("invalid system data: {0}")]
    InvalidSpec(String),

    #[error("second-order check requires hessians for every component of G")]
    MissingHessians,

    #[error("{0} requires `param_lipschitz: true` (Lipschitz dependence of G on the parameter)")]
    MissingParamLipschitz(&'static str),

    #[error(
        "theorem-mode Aubin check needs metric subregularity of the joint map: \
         joint FOSCMS did not hold and no assertion was supplied"
    )]
    NoSubregularityEvidence,

    #[error("internal error: a witness of {0} did not replay against the cone layer")]
    WitnessReplay(String),

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
