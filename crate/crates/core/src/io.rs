//! Scenario documents and distribution output.
//!
//! A scenario document is a JSON object:
//!
//! ```text
//! factors         [{name, dim}]
//! initial_state   {kind, payload, preparation?}
//! initial_region  {points: [[t, x...]]}
//! instruments     [{name, region: {points, velocity?}, portions: [...], f?}]
//! frame?          {velocity}
//! lattice?        {n_sites, per_site_dim, mass, coupling, positions, time}
//! ```
//!
//! A portion is `{name, factors | lattice_sites, observable?, smearing?,
//! points?}`. `observable` is a named operator or a matrix whose entries are
//! numbers or `[re, im]` pairs. With a lattice, factors `site0, site1, ...`
//! come first and the listed factors follow.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::field::{ground_initial_state, lattice_factors, smeared_portion_operator, LatticeSpec};
use crate::geometry::{Event, Region};
use crate::linalg::{c, CMatrix, DensityMatrix, C64};
use crate::observables::PortionObservable;
use crate::operators;
use crate::outcome_fn::{parse_f, OutcomeFunction};
use crate::scenario::{Factor, Instrument, Scenario};

/// Named initial states.
pub const NAMED_STATES: &[&str] = &["ghz", "plus", "ground", "maximally_mixed"];

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::schema(path, message)
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let m = v.as_object().ok_or_else(|| schema(path, "expected an object"))?;
    if let Some(k) = m.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(schema(path, format!("unknown key '{k}'")));
    }
    Ok(m)
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| schema(path, format!("missing key '{key}'")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| schema(path, "expected a finite number"))
}

fn index(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn numbers(v: &Value, path: &str) -> Result<Vec<f64>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

fn indices(v: &Value, path: &str) -> Result<Vec<usize>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| index(x, &format!("{path}[{i}]")))
        .collect()
}

fn complex(v: &Value, path: &str) -> Result<C64> {
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok(c(
            number(&pair[0], &format!("{path}[0]"))?,
            number(&pair[1], &format!("{path}[1]"))?,
        )),
        _ => Ok(c(number(v, path)?, 0.0)),
    }
}

fn complex_vector(v: &Value, path: &str) -> Result<Vec<C64>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| complex(x, &format!("{path}[{i}]")))
        .collect()
}

fn matrix(v: &Value, path: &str) -> Result<CMatrix> {
    let rows = array(v, path)?;
    let n = rows.len();
    if n == 0 {
        return Err(schema(path, "empty matrix"));
    }
    let mut m = CMatrix::zeros(n, n);
    for (r, row) in rows.iter().enumerate() {
        let row = complex_vector(row, &format!("{path}[{r}]"))?;
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{path}[{r}] has {} entries, expected {n}",
                row.len()
            )));
        }
        for (k, z) in row.into_iter().enumerate() {
            m[(r, k)] = z;
        }
    }
    Ok(m)
}

fn event(v: &Value, path: &str) -> Result<Event> {
    let a = numbers(v, path)?;
    Event::from_array(&a).ok_or_else(|| schema(path, "an event is [t, x] with 1 to 3 spatial coordinates"))
}

fn region(v: &Value, path: &str) -> Result<Region> {
    let m = object(v, path, &["points", "velocity"])?;
    let pts_path = format!("{path}.points");
    let points = array(field(m, "points", path)?, &pts_path)?
        .iter()
        .enumerate()
        .map(|(i, p)| event(p, &format!("{pts_path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if points.is_empty() {
        return Err(schema(&pts_path, "region has no points"));
    }
    let mut r = Region::new(points);
    if let Some(vel) = m.get("velocity") {
        let vel = numbers(vel, &format!("{path}.velocity"))?;
        if vel.len() != r.velocity.len() {
            return Err(Error::DimensionMismatch(format!(
                "{path}.velocity has {} components, points have {}",
                vel.len(),
                r.velocity.len()
            )));
        }
        r.velocity = vel;
    }
    Ok(r)
}

fn factor_index(factors: &[Factor], v: &Value, path: &str) -> Result<usize> {
    let name = string(v, path)?;
    factors
        .iter()
        .position(|f| f.name == name)
        .ok_or_else(|| schema(path, format!("unknown factor '{name}'")))
}

fn basis_product(dims: &[usize], amps_per_factor: &[Vec<C64>]) -> Vec<C64> {
    let mut psi = vec![c(1.0, 0.0)];
    for (d, amps) in dims.iter().zip(amps_per_factor) {
        let mut next = Vec::with_capacity(psi.len() * d);
        for a in &psi {
            for b in amps {
                next.push(a * b);
            }
        }
        psi = next;
    }
    psi
}

fn initial_state(
    v: &Value,
    factors: &[Factor],
    lattice: Option<&LatticeSpec>,
    n_lattice: usize,
) -> Result<DensityMatrix> {
    let path = "initial_state";
    let m = object(v, path, &["kind", "payload", "preparation"])?;
    let kind = string(field(m, "kind", path)?, "initial_state.kind")?;
    let payload = field(m, "payload", path)?;
    let dims: Vec<usize> = factors.iter().map(|f| f.dim).collect();
    let total: usize = dims.iter().product();
    let preparation = m
        .get("preparation")
        .map(|p| matrix(p, "initial_state.preparation"))
        .transpose()?;
    let pure = |amps: Vec<C64>| -> Result<DensityMatrix> {
        if amps.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "state vector has {} amplitudes, the factors span {total}",
                amps.len()
            )));
        }
        DensityMatrix::pure(&amps)
    };
    let rho = match kind {
        "matrix" => {
            let m = matrix(payload, "initial_state.payload")?;
            if m.nrows() != total {
                return Err(Error::DimensionMismatch(format!(
                    "initial state has dimension {}, the factors span {total}",
                    m.nrows()
                )));
            }
            DensityMatrix::new(m)?
        }
        "vector" => pure(complex_vector(payload, "initial_state.payload")?)?,
        "product" => {
            let parts = array(payload, "initial_state.payload")?;
            if parts.len() != factors.len() {
                return Err(schema(
                    "initial_state.payload",
                    format!("{} factor states for {} factors", parts.len(), factors.len()),
                ));
            }
            let amps = parts
                .iter()
                .enumerate()
                .map(|(i, p)| complex_vector(p, &format!("initial_state.payload[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            for (i, (a, d)) in amps.iter().zip(&dims).enumerate() {
                if a.len() != *d {
                    return Err(Error::DimensionMismatch(format!(
                        "initial_state.payload[{i}] has {} amplitudes for a factor of dimension {d}",
                        a.len()
                    )));
                }
            }
            pure(basis_product(&dims, &amps))?
        }
        "named" => {
            let name = string(payload, "initial_state.payload")?;
            match name {
                "ghz" => {
                    if dims.iter().any(|&d| d < 2) {
                        return Err(Error::DimensionMismatch("'ghz' needs factors of dimension >= 2".into()));
                    }
                    let h = std::f64::consts::FRAC_1_SQRT_2;
                    let mut amps = vec![c(0.0, 0.0); total];
                    amps[0] = c(h, 0.0);
                    let ones = dims.iter().fold(0, |acc, &d| acc * d + 1);
                    amps[ones] = c(h, 0.0);
                    pure(amps)?
                }
                "plus" => {
                    let amps = dims
                        .iter()
                        .map(|&d| vec![c(1.0 / (d as f64).sqrt(), 0.0); d])
                        .collect::<Vec<_>>();
                    pure(basis_product(&dims, &amps))?
                }
                "maximally_mixed" => DensityMatrix::maximally_mixed(total),
                "ground" => {
                    let l = lattice.ok_or_else(|| schema("initial_state.payload", "'ground' needs a lattice"))?;
                    let (rho, _) = ground_initial_state(l, &factors[n_lattice..], preparation.as_ref())?;
                    return Ok(rho);
                }
                other => {
                    return Err(schema(
                        "initial_state.payload",
                        format!("unknown named state '{other}' (known: {})", NAMED_STATES.join(", ")),
                    ))
                }
            }
        }
        other => return Err(schema("initial_state.kind", format!("unknown kind '{other}'"))),
    };
    match preparation {
        None => Ok(rho),
        Some(u) => {
            if u.nrows() != total {
                return Err(Error::DimensionMismatch(format!(
                    "preparation is {0}x{0}, the factors span {total}",
                    u.nrows()
                )));
            }
            let defect = crate::linalg::max_abs(&(u.adjoint() * &u - crate::linalg::identity(total)));
            if defect > 1e-9 {
                return Err(Error::InvalidState(format!("preparation is not unitary (defect {defect:.3e})")));
            }
            DensityMatrix::new(&u * rho.matrix() * u.adjoint())
        }
    }
}

fn lattice_spec(v: &Value) -> Result<LatticeSpec> {
    let path = "lattice";
    let m = object(
        v,
        path,
        &["n_sites", "per_site_dim", "mass", "coupling", "positions", "time"],
    )?;
    let get = |k: &str| field(m, k, path);
    LatticeSpec::new(
        index(get("n_sites")?, "lattice.n_sites")?,
        index(get("per_site_dim")?, "lattice.per_site_dim")?,
        number(get("mass")?, "lattice.mass")?,
        number(get("coupling")?, "lattice.coupling")?,
        numbers(get("positions")?, "lattice.positions")?,
        number(get("time")?, "lattice.time")?,
    )
}

struct Context<'a> {
    factors: &'a [Factor],
    dims: Vec<usize>,
    lattice: Option<&'a LatticeSpec>,
}

fn portion(
    ctx: &Context,
    v: &Value,
    path: &str,
    claimed_sites: &mut Vec<usize>,
) -> Result<(PortionObservable, Option<Vec<usize>>)> {
    let m = object(
        v,
        path,
        &["name", "factors", "lattice_sites", "observable", "smearing", "points"],
    )?;
    let name = string(field(m, "name", path)?, &format!("{path}.name"))?;
    let points = m
        .get("points")
        .map(|p| indices(p, &format!("{path}.points")))
        .transpose()?;

    if let Some(sites) = m.get("lattice_sites") {
        if m.contains_key("factors") || m.contains_key("observable") {
            return Err(schema(path, "a lattice portion takes 'lattice_sites' and 'smearing' only"));
        }
        let l = ctx
            .lattice
            .ok_or_else(|| schema(path, "'lattice_sites' needs a lattice"))?;
        let sites = indices(sites, &format!("{path}.lattice_sites"))?;
        let weights = match m.get("smearing") {
            Some(w) => numbers(w, &format!("{path}.smearing"))?,
            None => vec![1.0; sites.len()],
        };
        let obs = smeared_portion_operator(l, name, &sites, &weights, claimed_sites, &ctx.dims)?;
        claimed_sites.extend(&sites);
        return Ok((obs, points));
    }

    if m.contains_key("smearing") {
        return Err(schema(path, "'smearing' applies to lattice portions only"));
    }
    let fpath = format!("{path}.factors");
    let targets = array(field(m, "factors", path)?, &fpath)?
        .iter()
        .enumerate()
        .map(|(i, f)| factor_index(ctx.factors, f, &format!("{fpath}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if targets.is_empty() {
        return Err(schema(&fpath, "a portion acts on at least one factor"));
    }
    let local_dim: usize = targets.iter().map(|&t| ctx.dims[t]).product();
    let opath = format!("{path}.observable");
    let local = match field(m, "observable", path)? {
        Value::String(n) => operators::named(n, local_dim).map_err(|e| match e {
            Error::SchemaError { message, .. } => schema(&opath, message),
            other => other,
        })?,
        other => matrix(other, &opath)?,
    };
    Ok((PortionObservable::new(name, local, targets, &ctx.dims)?, points))
}

fn instrument(ctx: &Context, v: &Value, path: &str) -> Result<Instrument> {
    let m = object(v, path, &["name", "region", "portions", "f"])?;
    let name = string(field(m, "name", path)?, &format!("{path}.name"))?;
    let region = region(field(m, "region", path)?, &format!("{path}.region"))?;
    let ppath = format!("{path}.portions");
    let list = array(field(m, "portions", path)?, &ppath)?;
    if list.is_empty() {
        return Err(schema(&ppath, "an instrument needs at least one portion"));
    }
    let mut claimed = Vec::new();
    let mut portions = Vec::with_capacity(list.len());
    let mut points = Vec::with_capacity(list.len());
    for (k, p) in list.iter().enumerate() {
        let (obs, pts) = portion(ctx, p, &format!("{ppath}[{k}]"), &mut claimed)?;
        portions.push(obs);
        points.push(pts);
    }
    let assignment = if list.len() == 1 {
        vec![points.pop().flatten().unwrap_or_else(|| (0..region.points.len()).collect())]
    } else {
        points
            .into_iter()
            .enumerate()
            .map(|(k, p)| p.ok_or_else(|| schema(&format!("{ppath}[{k}]"), "missing key 'points'")))
            .collect::<Result<Vec<_>>>()?
    };
    let fpath = format!("{path}.f");
    let f = match m.get("f") {
        Some(expr) => parse_f(string(expr, &fpath)?, list.len()).map_err(|e| schema(&fpath, e.to_string()))?,
        None if list.len() == 1 => OutcomeFunction::identity(),
        None => return Err(schema(path, "missing key 'f'")),
    };
    Instrument::new(name, region, portions, assignment, f)
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    start + column.saturating_sub(1)
}

/// Parses and fully validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::ParseError {
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })?;
    scenario_from_document(&doc)
}

pub fn scenario_from_document(doc: &Value) -> Result<Scenario> {
    let top = object(
        doc,
        "$",
        &["factors", "initial_state", "initial_region", "instruments", "frame", "lattice"],
    )?;
    let lattice = top.get("lattice").map(lattice_spec).transpose()?;

    let mut listed = Vec::new();
    if let Some(fs) = top.get("factors") {
        for (i, f) in array(fs, "factors")?.iter().enumerate() {
            let path = format!("factors[{i}]");
            let m = object(f, &path, &["name", "dim"])?;
            let name = string(field(m, "name", &path)?, &format!("{path}.name"))?;
            let dim = index(field(m, "dim", &path)?, &format!("{path}.dim"))?;
            if dim == 0 {
                return Err(schema(&format!("{path}.dim"), "dimension must be positive"));
            }
            listed.push(Factor::new(name, dim));
        }
    } else if lattice.is_none() {
        return Err(schema("$", "missing key 'factors'"));
    }
    let n_lattice = lattice.as_ref().map_or(0, |l| l.n_sites);
    let factors = match &lattice {
        Some(l) => lattice_factors(l, &listed),
        None => listed,
    };
    if factors.is_empty() {
        return Err(schema("factors", "need at least one factor"));
    }
    for (i, f) in factors.iter().enumerate() {
        if factors[..i].iter().any(|g| g.name == f.name) {
            return Err(schema("factors", format!("duplicate factor name '{}'", f.name)));
        }
    }

    let rho = initial_state(field(top, "initial_state", "$")?, &factors, lattice.as_ref(), n_lattice)?;
    let initial = region(field(top, "initial_region", "$")?, "initial_region")?;
    let ctx = Context {
        factors: &factors,
        dims: factors.iter().map(|f| f.dim).collect(),
        lattice: lattice.as_ref(),
    };
    let instruments = array(field(top, "instruments", "$")?, "instruments")?
        .iter()
        .enumerate()
        .map(|(i, v)| instrument(&ctx, v, &format!("instruments[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let frame = match top.get("frame") {
        Some(f) => {
            let m = object(f, "frame", &["velocity"])?;
            Some(numbers(field(m, "velocity", "frame")?, "frame.velocity")?)
        }
        None => None,
    };
    Scenario::new(factors, rho, initial, instruments, frame, lattice)
}

fn complex_value(z: C64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

fn matrix_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|k| complex_value(m[(r, k)])).collect()))
            .collect(),
    )
}

fn region_value(r: &Region) -> Value {
    json!({
        "points": r.points.iter().map(Event::to_array).collect::<Vec<_>>(),
        "velocity": r.velocity,
    })
}

/// Document form of a scenario. Operators and the state are written out as
/// explicit matrices, so parsing the result reproduces the scenario.
pub fn to_document(s: &Scenario) -> Value {
    let n_lattice = s.lattice.as_ref().map_or(0, |l| l.n_sites);
    let mut doc = Map::new();
    doc.insert(
        "factors".into(),
        Value::Array(
            s.factors[n_lattice..]
                .iter()
                .map(|f| json!({"name": f.name, "dim": f.dim}))
                .collect(),
        ),
    );
    doc.insert(
        "initial_state".into(),
        json!({"kind": "matrix", "payload": matrix_value(s.rho0.matrix())}),
    );
    doc.insert("initial_region".into(), region_value(&s.initial_region));
    let instruments = s
        .instruments
        .iter()
        .map(|inst| {
            let portions: Vec<Value> = inst
                .observable
                .portions
                .iter()
                .zip(&inst.portion_points)
                .map(|(p, pts)| {
                    json!({
                        "name": p.name,
                        "factors": p.factors.iter().map(|&f| s.factors[f].name.clone()).collect::<Vec<_>>(),
                        "observable": matrix_value(&p.local),
                        "points": pts,
                    })
                })
                .collect();
            json!({
                "name": inst.name,
                "region": region_value(&inst.region),
                "portions": portions,
                "f": inst.observable.f.to_string(),
            })
        })
        .collect();
    doc.insert("instruments".into(), Value::Array(instruments));
    if let Some(v) = &s.frame {
        doc.insert("frame".into(), json!({ "velocity": v }));
    }
    if let Some(l) = &s.lattice {
        doc.insert("lattice".into(), serde_json::to_value(l).expect("plain data"));
    }
    Value::Object(doc)
}

pub fn serialize_scenario(s: &Scenario) -> String {
    let mut text = serde_json::to_string_pretty(&to_document(s)).expect("plain data");
    text.push('\n');
    text
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Records,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "records" => Ok(Format::Records),
            _ => Err(schema("format", format!("unknown format '{s}'"))),
        }
    }
}

/// Outcome value with at most 10 decimals and no trailing zeros.
pub fn format_value(v: f64) -> String {
    let mut s = format!("{v:.10}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Probability with 12 decimals; rounding noise below zero prints as zero.
pub fn format_probability(p: f64) -> String {
    let p = if (-1e-12..0.0).contains(&p) { 0.0 } else { p };
    let s = format!("{p:.12}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Deterministic text form: axes in order, outcomes ascending.
pub fn serialize_distribution(d: &OutcomeDistribution, format: Format) -> String {
    let rows: Vec<(Vec<String>, String)> = d
        .iter()
        .map(|(o, p)| (o.into_iter().map(format_value).collect(), format_probability(p)))
        .collect();
    let mut out = String::new();
    match format {
        Format::Records => {
            for (o, p) in &rows {
                let fields: Vec<String> = d
                    .axes
                    .iter()
                    .zip(o)
                    .map(|(a, v)| format!("{}:{v}", Value::String(a.clone())))
                    .collect();
                let _ = writeln!(out, "{{\"outcome\":{{{}}},\"probability\":{p}}}", fields.join(","));
            }
        }
        Format::Table => {
            let mut header: Vec<String> = d.axes.clone();
            header.push("probability".into());
            let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
            for (o, p) in &rows {
                for (w, cell) in widths.iter_mut().zip(o.iter().chain(std::iter::once(p))) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: Vec<&str>| -> String {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c:<w$}"))
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            let _ = writeln!(out, "{}", line(header.iter().map(String::as_str).collect()));
            for (o, p) in &rows {
                let cells: Vec<&str> = o.iter().map(String::as_str).chain(std::iter::once(p.as_str())).collect();
                let _ = writeln!(out, "{}", line(cells));
            }
        }
    }
    out
}

/// Reads the output of `serialize_distribution(.., Format::Records)`.
pub fn parse_records(text: &str) -> Result<OutcomeDistribution> {
    let mut dist: Option<OutcomeDistribution> = None;
    let mut offset = 0;
    for (n, line) in text.split_inclusive('\n').enumerate() {
        let start = offset;
        offset += line.len();
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line).map_err(|e| Error::ParseError {
            offset: start + e.column().saturating_sub(1),
            message: e.to_string(),
        })?;
        let path = format!("records[{n}]");
        let m = object(&v, &path, &["outcome", "probability"])?;
        let outcome = field(m, "outcome", &path)?
            .as_object()
            .ok_or_else(|| schema(&format!("{path}.outcome"), "expected an object"))?;
        let p = number(field(m, "probability", &path)?, &format!("{path}.probability"))?;
        let axes: Vec<String> = outcome.keys().cloned().collect();
        let values = outcome
            .iter()
            .map(|(k, x)| number(x, &format!("{path}.outcome.{k}")))
            .collect::<Result<Vec<_>>>()?;
        let d = dist.get_or_insert_with(|| OutcomeDistribution::new(axes.clone()));
        if d.axes != axes {
            return Err(schema(&path, "records disagree on the outcome axes"));
        }
        d.add(&values, p);
    }
    Ok(dist.unwrap_or_default())
}

/// Documents of the bundled scenarios, by name.
pub fn bundled_document(name: &str) -> Option<&'static str> {
    match name {
        "sorkin-linear" => Some(include_str!("../fixtures/sorkin-linear.scn")),
        "sorkin-square" => Some(include_str!("../fixtures/sorkin-square.scn")),
        "unsplit" => Some(include_str!("../fixtures/unsplit.scn")),
        "field" => Some(include_str!("../fixtures/field.scn")),
        _ => None,
    }
}
