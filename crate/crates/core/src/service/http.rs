//! HTTP JSON API.
//!
//! Every error body is `{code, message, fsa_state}`; consult failures add the
//! partial supervisor `trace`.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{self, Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use super::{consult, ConsultError, ConsultRequest, ErrorCode, Knowledge};
use crate::casebase::{self, CaseBaseError, ClinicalCase};
use crate::eval::{self, roc, run_cv, CvConfig, EvalError, FoldResult, LabeledCase, RocCurve};
use crate::ontology::{Ontology, OntologyError, Term};
use crate::reasoning::ConsultState;
use crate::similarity::{retrieve_top_k, RankedCase, SimilarityOptions};

#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub fsa_state: Option<ConsultState>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            fsa_state: None,
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_request", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<OntologyError> for ApiError {
    fn from(e: OntologyError) -> Self {
        let (status, code) = match e {
            OntologyError::UnknownTerm(_) => (StatusCode::NOT_FOUND, "unknown_term"),
            OntologyError::NoCommonAncestor { .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "no_common_ancestor")
            }
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "ontology_failure"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<CaseBaseError> for ApiError {
    fn from(e: CaseBaseError) -> Self {
        let (status, code) = match e {
            CaseBaseError::DuplicateId(_) => (StatusCode::CONFLICT, "duplicate_id"),
            CaseBaseError::UnknownCase(_) => (StatusCode::NOT_FOUND, "unknown_case"),
            CaseBaseError::InvalidCase { .. } | CaseBaseError::UnknownDiagnosisTerm { .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "invalid_case")
            }
            CaseBaseError::MalformedRecord { .. } => (StatusCode::BAD_REQUEST, "malformed_record"),
            CaseBaseError::IoFailure(_) => (StatusCode::INTERNAL_SERVER_ERROR, "io_failure"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<EvalError> for ApiError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::CaseBase(inner) => inner.into(),
            other => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "evaluation_failure",
                other.to_string(),
            ),
        }
    }
}

struct ConsultFailure(ConsultError);

impl IntoResponse for ConsultFailure {
    fn into_response(self) -> Response {
        let status = match self.0.code {
            ErrorCode::OntologyNotLoaded => StatusCode::SERVICE_UNAVAILABLE,
            ErrorCode::InvalidRequest => StatusCode::BAD_REQUEST,
            ErrorCode::RuleFailure | ErrorCode::CaseBaseFailure => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        (status, Json(self.0)).into_response()
    }
}

fn ontology(k: &Knowledge) -> Result<&Ontology, ApiError> {
    k.ontology.as_deref().ok_or_else(|| {
        ApiError::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "ontology_not_loaded",
            "ontology is not loaded",
        )
    })
}

fn joined<T>(r: Result<T, tokio::task::JoinError>) -> Result<T, ApiError> {
    r.map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))
}

type Shared = Arc<Knowledge>;
type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub ontology_terms: usize,
    pub case_count: usize,
    pub revision: u64,
}

async fn health(State(k): State<Shared>) -> Json<Health> {
    let snap = k.cases.snapshot();
    Json(Health {
        status: if k.ontology.is_some() { "ok" } else { "degraded" }.to_string(),
        ontology_terms: k.ontology.as_ref().map_or(0, |o| o.len()),
        case_count: snap.len(),
        revision: snap.revision(),
    })
}

async fn term(State(k): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<Term> {
    let o = ontology(&k)?;
    o.any_term(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| OntologyError::UnknownTerm(id).into())
}

#[derive(Debug, Deserialize)]
struct PairQuery {
    a: String,
    b: String,
}

async fn similarity(
    State(k): State<Shared>,
    q: Result<extract::Query<PairQuery>, QueryRejection>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let q = q?;
    let score = ontology(&k)?.term_similarity(&q.a, &q.b)?;
    Ok(Json(json!({ "score": score })))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseAccepted {
    pub case_id: String,
    pub revision: u64,
}

async fn add_case(
    State(k): State<Shared>,
    body: Result<Json<ClinicalCase>, JsonRejection>,
) -> ApiResult<CaseAccepted> {
    let Json(case) = body?;
    let accepted = tokio::task::spawn_blocking(move || {
        let o = ontology(&k)?;
        k.cases
            .mutate(|cb| {
                let case_id = case.case_id.clone();
                let revision = cb.add_case(case, Some(o))?;
                if let Some(path) = &k.case_store_path {
                    casebase::save(cb, path)?;
                }
                Ok::<_, CaseBaseError>(CaseAccepted { case_id, revision })
            })
            .map_err(ApiError::from)
    })
    .await;
    Ok(Json(joined(accepted)??))
}

async fn get_case(State(k): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<ClinicalCase> {
    k.cases
        .snapshot()
        .get(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| CaseBaseError::UnknownCase(id).into())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrieveRequest {
    pub query: ClinicalCase,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default = "yes")]
    pub use_ontology: bool,
}

fn yes() -> bool {
    true
}

async fn retrieve(
    State(k): State<Shared>,
    body: Result<Json<RetrieveRequest>, JsonRejection>,
) -> ApiResult<Vec<RankedCase>> {
    let Json(mut req) = body?;
    let o = ontology(&k)?;
    let top_k = req.k.unwrap_or(k.k_default);
    if top_k == 0 {
        return Err(ApiError::bad_request("k must be at least 1"));
    }
    req.query.normalize();
    let opts = SimilarityOptions {
        use_ontology: req.use_ontology,
    };
    Ok(Json(retrieve_top_k(
        &k.cases.snapshot(),
        &req.query,
        top_k,
        &k.weights,
        o,
        opts,
    )))
}

async fn consult_handler(
    State(k): State<Shared>,
    body: Result<Json<ConsultRequest>, JsonRejection>,
) -> Response {
    let req = match body {
        Ok(Json(req)) => req,
        Err(r) => return ApiError::from(r).into_response(),
    };
    match tokio::task::spawn_blocking(move || consult(&req, &k)).await {
        Ok(Ok(answer)) => Json(answer).into_response(),
        Ok(Err(e)) => ConsultFailure(e).into_response(),
        Err(e) => joined::<()>(Err(e)).unwrap_err().into_response(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateRequest {
    #[serde(default)]
    pub dataset_path: Option<PathBuf>,
    #[serde(default)]
    pub cases: Option<Vec<LabeledCase>>,
    #[serde(default = "default_k_neighbors")]
    pub k_neighbors: usize,
    #[serde(default = "yes")]
    pub use_ontology: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_folds")]
    pub folds: usize,
}

fn default_k_neighbors() -> usize {
    5
}

fn default_folds() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateResponse {
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
    /// Tab-separated rendering of `folds`.
    pub table: String,
    pub roc: RocCurve,
}

/// Cross-validate `data` and attach the ROC curve of the pooled posteriors.
pub fn evaluate(
    data: &[LabeledCase],
    config: &CvConfig,
    o: &Ontology,
) -> Result<EvaluateResponse, EvalError> {
    let report = run_cv(data, config, o)?;
    let scored: Vec<_> = report.scored.iter().map(|s| (s.posterior, s.truth)).collect();
    let curve = roc(&scored)?;
    Ok(EvaluateResponse {
        table: eval::render_table(&report),
        folds: report.folds,
        mean_accuracy: report.mean_accuracy,
        roc: curve,
    })
}

async fn evaluate_handler(
    State(k): State<Shared>,
    body: Result<Json<EvaluateRequest>, JsonRejection>,
) -> ApiResult<EvaluateResponse> {
    let Json(req) = body?;
    let data = match (req.dataset_path, req.cases) {
        (Some(_), Some(_)) => {
            return Err(ApiError::bad_request(
                "give either dataset_path or cases, not both",
            ))
        }
        (None, None) => return Err(ApiError::bad_request("dataset_path or cases is required")),
        (None, Some(cases)) => cases,
        (Some(path), None) => eval::load_labeled(&path)?,
    };
    let config = CvConfig {
        folds: req.folds,
        k_neighbors: req.k_neighbors,
        weights: k.weights,
        use_ontology: req.use_ontology,
        seed: req.seed,
    };
    let out = tokio::task::spawn_blocking(move || {
        let o = ontology(&k)?;
        evaluate(&data, &config, o).map_err(ApiError::from)
    })
    .await;
    Ok(Json(joined(out)??))
}

/// The API routes, with `static_assets_dir` (if any) served for every other
/// path.
pub fn router(knowledge: Shared, static_assets_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/ontology/terms/{id}", get(term))
        .route("/api/ontology/similarity", get(similarity))
        .route("/api/cases", post(add_case))
        .route("/api/cases/{id}", get(get_case))
        .route("/api/retrieve", post(retrieve))
        .route("/api/consult", post(consult_handler))
        .route("/api/evaluate", post(evaluate_handler))
        .with_state(knowledge);
    match static_assets_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serve until Ctrl-C.
pub async fn serve(
    knowledge: Shared,
    addr: SocketAddr,
    static_assets_dir: Option<&Path>,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(knowledge, static_assets_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
