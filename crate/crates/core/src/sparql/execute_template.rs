//! Template execution with capability-aware form selection.
//!
//! Whatever form is issued, the caller gets rows in the canonical shape of
//! the template: fallback listings are aggregated or subsampled here.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::client::SparqlClient;
use super::endpoint::{CapabilityProfile, EndpointDescriptor};
use super::results::{Binding, QueryResult};
use super::templates::{
    render_canonical, render_fallback, TemplateId, TemplateParams, DEFAULT_SAMPLE_SIZE,
    FALLBACK_PAGE_SIZE, FALLBACK_SAMPLE_POOL,
};
use super::ClientError;
use crate::term::{Term, RDF_TYPE, XSD_INTEGER};

/// Sample size and seed for SQ4/SQ5.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingOptions {
    pub sample_n: usize,
    pub seed: u64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            sample_n: DEFAULT_SAMPLE_SIZE,
            seed: 0,
        }
    }
}

/// Which form of a template gets issued.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryForm {
    Canonical,
    Fallback,
}

/// Form to use first for `id` under `profile`.
pub fn select_form(id: TemplateId, profile: &CapabilityProfile) -> Result<QueryForm, ClientError> {
    if !profile.supports_named_graphs {
        return Err(ClientError::UnsupportedTemplate {
            template: id,
            reason: "endpoint does not expose named graphs".into(),
        });
    }
    let canonical_ok = match id {
        TemplateId::Sq1 => true,
        TemplateId::Sq2 => profile.supports_group_by,
        TemplateId::Sq3 => profile.supports_group_by && profile.supports_bind,
        TemplateId::Sq4 | TemplateId::Sq5 => profile.supports_order_by_rand,
    };
    Ok(if canonical_ok {
        QueryForm::Canonical
    } else {
        QueryForm::Fallback
    })
}

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn count_literal(n: usize) -> Term {
    Term::typed(n.to_string(), XSD_INTEGER)
}

/// FNV-1a, used to derive per-query seeds that do not depend on crawl order.
pub(crate) fn stable_hash(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for b in part.bytes().chain(std::iter::once(0xff)) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

impl SparqlClient {
    /// Runs template `id` against `endpoint`, choosing the canonical or the
    /// fallback form from the endpoint's capability profile. A canonical
    /// query that times out is retried once in fallback form.
    pub fn execute_template(
        &self,
        endpoint: &EndpointDescriptor,
        id: TemplateId,
        params: &TemplateParams,
        sampling: SamplingOptions,
    ) -> Result<QueryResult, ClientError> {
        params.check(id)?;
        let profile = endpoint.capability_or_full();
        match select_form(id, &profile)? {
            QueryForm::Fallback => self.run_fallback(endpoint, id, params, sampling),
            QueryForm::Canonical => {
                let query = render_canonical(id, params, sampling.sample_n)?;
                match self.execute(endpoint, &query) {
                    Ok(result) => Ok(normalize_canonical(id, result)),
                    Err(err) if should_fall_back(id, &err) => {
                        log::info!("{}: {id} failed ({err}); trying fallback form", endpoint.id);
                        self.run_fallback(endpoint, id, params, sampling)
                    }
                    Err(err) => Err(err),
                }
            }
        }
    }

    fn run_fallback(
        &self,
        endpoint: &EndpointDescriptor,
        id: TemplateId,
        params: &TemplateParams,
        sampling: SamplingOptions,
    ) -> Result<QueryResult, ClientError> {
        match id {
            TemplateId::Sq1 => {
                let query = render_fallback(id, params, 0, 0)?;
                Ok(normalize_canonical(id, self.execute(endpoint, &query)?))
            }
            TemplateId::Sq2 => {
                let rows = self.fetch_pages(endpoint, id, params, usize::MAX)?;
                Ok(aggregate_class_counts(&rows))
            }
            TemplateId::Sq3 => {
                let rows = self.fetch_pages(endpoint, id, params, usize::MAX)?;
                Ok(aggregate_realizations(&rows))
            }
            TemplateId::Sq4 | TemplateId::Sq5 => {
                let pool = FALLBACK_SAMPLE_POOL.max(sampling.sample_n);
                let rows = self.fetch_pages(endpoint, id, params, pool)?;
                let seed = sampling.seed
                    ^ stable_hash(&[
                        params.graph.as_deref().unwrap_or_default(),
                        params.concept.as_deref().unwrap_or_default(),
                        params.property.as_deref().unwrap_or_default(),
                    ]);
                Ok(subsample(rows, sampling.sample_n, seed))
            }
        }
    }

    fn fetch_pages(
        &self,
        endpoint: &EndpointDescriptor,
        id: TemplateId,
        params: &TemplateParams,
        max_rows: usize,
    ) -> Result<Vec<Binding>, ClientError> {
        let mut rows = Vec::new();
        let mut offset = 0;
        loop {
            let limit = FALLBACK_PAGE_SIZE.min(max_rows - rows.len());
            let query = render_fallback(id, params, limit, offset)?;
            let page = self.execute(endpoint, &query)?;
            let got = page.rows.len();
            rows.extend(page.rows);
            offset += got;
            if got < limit || rows.len() >= max_rows {
                return Ok(rows);
            }
        }
    }
}

fn should_fall_back(id: TemplateId, err: &ClientError) -> bool {
    match id {
        TemplateId::Sq1 => !matches!(err, ClientError::NetworkUnreachable { .. }),
        _ => matches!(err, ClientError::QueryTimeout { .. }),
    }
}

/// Canonical answers pass through, except SQ3 rows for `rdf:type`, which the
/// template's filter (a string comparison) does not remove on real endpoints.
fn normalize_canonical(id: TemplateId, mut result: QueryResult) -> QueryResult {
    if id == TemplateId::Sq3 {
        result
            .rows
            .retain(|row| row.get("p").and_then(Term::as_iri) != Some(RDF_TYPE));
    }
    result
}

fn aggregate_class_counts(rows: &[Binding]) -> QueryResult {
    let mut counts: BTreeMap<&Term, usize> = BTreeMap::new();
    for row in rows {
        if let (Some(concept), Some(_)) = (row.get("Concept"), row.get("x")) {
            *counts.entry(concept).or_default() += 1;
        }
    }
    let mut out = QueryResult::new(vars(&["Concept", "cCount"]));
    let mut sorted: Vec<_> = counts.into_iter().collect();
    sorted.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    for (concept, n) in sorted {
        out.rows.push(Binding::from([
            ("Concept".to_string(), concept.clone()),
            ("cCount".to_string(), count_literal(n)),
        ]));
    }
    out
}

fn aggregate_realizations(rows: &[Binding]) -> QueryResult {
    type Key = (Term, Option<Term>, Option<String>);
    let mut counts: BTreeMap<Key, usize> = BTreeMap::new();
    for row in rows {
        let (Some(p), Some(o)) = (row.get("p"), row.get("o")) else {
            continue;
        };
        if p.as_iri() == Some(RDF_TYPE) || !row.contains_key("x") {
            continue;
        }
        let key = (
            p.clone(),
            row.get("c").cloned(),
            o.sparql_datatype().map(str::to_string),
        );
        *counts.entry(key).or_default() += 1;
    }
    let mut sorted: Vec<_> = counts.into_iter().collect();
    sorted.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut out = QueryResult::new(vars(&["p", "c", "count", "valType"]));
    for ((p, c, val_type), n) in sorted {
        let mut row = Binding::new();
        row.insert("p".into(), p);
        if let Some(c) = c {
            row.insert("c".into(), c);
        }
        row.insert("count".into(), count_literal(n));
        if let Some(dt) = val_type {
            row.insert("valType".into(), Term::iri(dt));
        }
        out.rows.push(row);
    }
    out
}

/// Keeps `n` rows chosen uniformly without replacement.
fn subsample(rows: Vec<Binding>, n: usize, seed: u64) -> QueryResult {
    let mut out = QueryResult::new(vars(&["x"]));
    if rows.len() <= n {
        out.rows = rows;
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked: BTreeSet<usize> = rand::seq::index::sample(&mut rng, rows.len(), n)
        .into_iter()
        .collect();
    out.rows = rows
        .into_iter()
        .enumerate()
        .filter(|(i, _)| picked.contains(i))
        .map(|(_, r)| r)
        .collect();
    out
}
