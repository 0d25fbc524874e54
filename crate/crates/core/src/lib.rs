//! Compiles character and event records into immersive 3D storyline scenes.
//!
//! The pipeline is: parse CSV ([`ingest`]) → validate ([`model`]) →
//! normalize into world units → per level of detail, filter by impact and
//! relayout along the time axis ([`layout::time`]) → place maps
//! ([`layout::geomap`]) → spline lines ([`geometry`]) → assemble and export
//! the scene document ([`scene`]).

pub mod geometry;
pub mod ingest;
pub mod layout;
pub mod model;
pub mod scene;
pub mod synth;

use thiserror::Error;

pub use geometry::{cubic_spline, point_event_membership, resolve_membership, Polyline3D};
pub use ingest::{IngestConfig, IngestError, Threshold};
pub use layout::geomap::{GeomapConfig, GeomapError, MapPlacement};
pub use layout::time::{optimize_time_layout, TimeLayoutParams, TimeLayoutResult};
pub use model::{
    validate_dataset, EventRecord, NormalizedDataset, SpatioTemporalPoint, ValidationReport, Vec3,
};
pub use scene::{
    build_scene, export_scene_json, parse_scene_json, CompileConfig, Lod, Perspective, SceneDocument,
    SceneError, VariantKey,
};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("ValidationFailed: {count} error(s)\n{report}", count = .0.errors().count(), report = .0)]
    Invalid(ValidationReport),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

/// Parsed records plus their validation report.
pub struct RawDataset {
    pub points: Vec<SpatioTemporalPoint>,
    pub events: Vec<EventRecord>,
    pub report: ValidationReport,
}

pub fn parse_and_validate(characters: &[u8], events: &[u8]) -> Result<RawDataset, IngestError> {
    let points = ingest::parse_characters_csv(characters)?;
    let events = ingest::parse_events_csv(events)?;
    let report = validate_dataset(&points, &events);
    Ok(RawDataset { points, events, report })
}

/// Parses, validates and normalizes a CSV pair. Validation errors abort.
pub fn load_dataset(characters: &[u8], events: &[u8], cfg: &IngestConfig) -> Result<NormalizedDataset, Error> {
    let raw = parse_and_validate(characters, events)?;
    if raw.report.has_errors() {
        return Err(Error::Invalid(raw.report));
    }
    Ok(ingest::normalize_space_time(&raw.points, &raw.events, cfg)?)
}

pub fn compile_scene(
    characters: &[u8],
    events: &[u8],
    name: &str,
    cfg: &CompileConfig,
) -> Result<SceneDocument, Error> {
    let dataset = load_dataset(characters, events, &cfg.ingest)?;
    Ok(build_scene(&dataset, name, cfg)?)
}

/// [`compile_scene`] followed by canonical export.
pub fn compile_scene_json(
    characters: &[u8],
    events: &[u8],
    name: &str,
    cfg: &CompileConfig,
) -> Result<Vec<u8>, Error> {
    compile_scene(characters, events, name, cfg).map(|s| export_scene_json(&s))
}
