//! Decodability: a client decodes message `j ∈ R_i` iff column `a_j` is not
//! in the span of the other columns of `A` indexed by `R_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{reduce_columns, solve_consistent, FMatrix};
use crate::instance::{ActiveSet, PliableInstance};

fn check_shape(a: &FMatrix, instance: &PliableInstance) -> Result<()> {
    if a.cols() != instance.m() {
        return Err(Error::DimensionMismatch {
            expected: instance.m(),
            found: a.cols(),
        });
    }
    Ok(())
}

/// Messages of `R_i` that client `i` can decode under `a`, ascending.
pub fn decodable_messages(a: &FMatrix, instance: &PliableInstance, client: usize) -> Result<Vec<usize>> {
    check_shape(a, instance)?;
    if client >= instance.n() {
        return Err(Error::OutOfRange { index: client, limit: instance.n() });
    }
    let req = instance.requirement(client);
    if req.is_empty() {
        return Ok(Vec::new());
    }
    let reduction = reduce_columns(&a.select_columns(req));
    Ok(reduction.isolated_columns().map(|k| req[k]).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Satisfied,
    Unsatisfied,
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientRecord {
    pub client: usize,
    pub status: Status,
    /// The delivered message when satisfied.
    pub decodes: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SatisfactionReport {
    pub records: Vec<ClientRecord>,
}

impl SatisfactionReport {
    pub fn satisfied(&self) -> Vec<usize> {
        self.with_status(Status::Satisfied)
    }

    pub fn unsatisfied(&self) -> Vec<usize> {
        self.with_status(Status::Unsatisfied)
    }

    fn with_status(&self, status: Status) -> Vec<usize> {
        self.records
            .iter()
            .filter(|r| r.status == status)
            .map(|r| r.client)
            .collect()
    }
}

/// Evaluates every client of `active`, plus a `vacuous` record for every
/// client with an empty requirement set. Each satisfied client is credited
/// with its smallest decodable message.
pub fn satisfied_set(
    a: &FMatrix,
    instance: &PliableInstance,
    active: &ActiveSet,
) -> Result<(Vec<usize>, SatisfactionReport)> {
    check_shape(a, instance)?;
    let mut records = Vec::new();
    let mut satisfied = Vec::new();
    for client in 0..instance.n() {
        if instance.is_vacuous(client) {
            records.push(ClientRecord { client, status: Status::Vacuous, decodes: None });
            continue;
        }
        if !active.contains(client) {
            continue;
        }
        let decodes = decodable_messages(a, instance, client)?.first().copied();
        let status = if decodes.is_some() {
            satisfied.push(client);
            Status::Satisfied
        } else {
            Status::Unsatisfied
        };
        records.push(ClientRecord { client, status, decodes });
    }
    Ok((satisfied, SatisfactionReport { records }))
}

pub fn satisfaction_report(a: &FMatrix, instance: &PliableInstance) -> Result<SatisfactionReport> {
    Ok(satisfied_set(a, instance, &instance.active_set())?.1)
}

pub fn is_valid_code(a: &FMatrix, instance: &PliableInstance) -> Result<bool> {
    check_shape(a, instance)?;
    for client in 0..instance.n() {
        if !instance.is_vacuous(client) && decodable_messages(a, instance, client)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decodes one message for `client` from the received transmissions `x`.
///
/// `side_values` holds the client's known messages in ascending message
/// order, aligned with [`PliableInstance::side_information`]. Returns the
/// smallest uniquely determined message and its value.
pub fn decode_value(
    a: &FMatrix,
    instance: &PliableInstance,
    client: usize,
    x: &[u32],
    side_values: &[u32],
) -> Result<(usize, u32)> {
    check_shape(a, instance)?;
    if client >= instance.n() {
        return Err(Error::OutOfRange { index: client, limit: instance.n() });
    }
    if x.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: x.len() });
    }
    let side = instance.side_information(client);
    if side_values.len() != side.len() {
        return Err(Error::DimensionMismatch { expected: side.len(), found: side_values.len() });
    }
    let field = a.field();
    let known = a.select_columns(&side).mul_vec(side_values)?;
    let residual: Vec<u32> = x.iter().zip(&known).map(|(&xk, &s)| field.sub(xk, s)).collect();

    let req = instance.requirement(client);
    let solution = solve_consistent(&a.select_columns(req), &residual)?;
    let k = solution.first_unique().ok_or(Error::NotDecodable(client))?;
    Ok((req[k], solution.values[k]))
}
