//! JSON file formats: PMOD modules, RECTS rectangle multisets and barcodes,
//! LINE embeddings.
//!
//! Scalars are written as strings (`"3/4"`, `"17"`); bare integers are
//! accepted when reading.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::{AxisEmbedding, AxisMap, GridBox, ModMorphism, PersModule};
use crate::linalg::{Field, Matrix, Scalar};
use crate::rect::{Barcode, RectDecomp, Rectangle};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct StepRecord {
    v: Vec<i64>,
    axis: usize,
    matrix: Vec<Vec<Entry>>,
}

#[derive(Serialize, Deserialize)]
struct PmodFile {
    field: String,
    n: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    dims: Vec<usize>,
    #[serde(default)]
    steps: Vec<StepRecord>,
}

#[derive(Serialize, Deserialize)]
struct RectRecord {
    b: Vec<i64>,
    d: Vec<i64>,
    #[serde(default = "one")]
    mult: usize,
}

fn one() -> usize {
    1
}

#[derive(Serialize, Deserialize)]
struct RectsFile {
    field: String,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lo: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hi: Option<Vec<i64>>,
    rects: Vec<RectRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MapRecord {
    Affine { scale: i64, offset: i64 },
    Table { start: i64, values: Vec<i64> },
}

#[derive(Serialize, Deserialize)]
struct InsertRecord {
    pos: usize,
    value: i64,
}

#[derive(Serialize, Deserialize)]
struct BoxRecord {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct LineFile {
    axis_maps: Vec<MapRecord>,
    insert_axis: InsertRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<BoxRecord>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn entry(x: &Scalar) -> Entry {
    Entry::Text(x.to_string())
}

fn scalar(field: Field, e: &Entry) -> Result<Scalar> {
    match e {
        Entry::Int(v) => Ok(field.from_i64(*v)),
        Entry::Text(s) => field.parse(s),
    }
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<Entry>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(entry).collect()).collect()
}

fn read_matrix(field: Field, rows: usize, cols: usize, data: &[Vec<Entry>], at: &str) -> Result<Matrix> {
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!("{at}: expected a {rows}x{cols} matrix")));
    }
    let flat = data.iter().flatten().map(|e| scalar(field, e)).collect::<Result<Vec<_>>>()?;
    Matrix::from_vec(field, rows, cols, flat)
}

fn check_n(n: usize, v: &[i64], what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::Parse(format!("{what} has {} coordinates, expected {n}", v.len())));
    }
    Ok(())
}

/// PMOD text of a module. Steps touching a zero space are omitted.
pub fn module_to_json(m: &PersModule) -> String {
    let bx = m.grid();
    let steps = m
        .steps()
        .filter(|(_, _, s)| s.rows() > 0 && s.cols() > 0)
        .map(|(v, axis, s)| StepRecord { v, axis, matrix: matrix_rows(s) })
        .collect();
    let f = PmodFile {
        field: m.field().label(),
        n: m.n(),
        lo: bx.lo().to_vec(),
        hi: bx.hi().to_vec(),
        dims: m.dims().to_vec(),
        steps,
    };
    serde_json::to_string_pretty(&f).expect("plain data serializes")
}

pub fn module_from_json(text: &str) -> Result<PersModule> {
    let f: PmodFile = serde_json::from_str(text).map_err(parse_err)?;
    let field = Field::from_label(&f.field)?;
    check_n(f.n, &f.lo, "lo")?;
    check_n(f.n, &f.hi, "hi")?;
    let bx = GridBox::new(f.lo, f.hi)?;
    if f.dims.len() != bx.len() {
        return Err(Error::Parse(format!("{} dims for a box of {} vertices", f.dims.len(), bx.len())));
    }
    let mut given = Vec::with_capacity(f.steps.len());
    for s in &f.steps {
        check_n(f.n, &s.v, "step vertex")?;
        let at = format!("step at {:?} axis {}", s.v, s.axis);
        let src = bx.index(&s.v).ok_or_else(|| Error::Parse(format!("{at}: vertex outside the box")))?;
        let dst = (s.axis < f.n).then(|| bx.up(src, s.axis)).flatten();
        let dst = dst.ok_or_else(|| Error::Parse(format!("{at}: leaves the box")))?;
        let m = read_matrix(field, f.dims[dst], f.dims[src], &s.matrix, &at)?;
        given.push((s.v.clone(), s.axis, m));
    }
    PersModule::new(field, bx, f.dims, given)
}

fn rect_records(rs: &[Rectangle]) -> Vec<RectRecord> {
    let mut out: Vec<RectRecord> = Vec::new();
    for r in rs {
        match out.last_mut() {
            Some(last) if last.b == r.b && last.d == r.d => last.mult += 1,
            _ => out.push(RectRecord { b: r.b.clone(), d: r.d.clone(), mult: 1 }),
        }
    }
    out
}

/// RECTS text; equal neighbours are merged into one record with a multiplicity.
pub fn rects_to_json(r: &RectDecomp) -> String {
    let f = RectsFile {
        field: r.field().label(),
        n: r.grid().n(),
        lo: Some(r.grid().lo().to_vec()),
        hi: Some(r.grid().hi().to_vec()),
        rects: rect_records(r.summands()),
    };
    serde_json::to_string_pretty(&f).expect("plain data serializes")
}

/// Without `lo`/`hi` the box is the bounding box of the rectangles.
pub fn rects_from_json(text: &str) -> Result<RectDecomp> {
    let f: RectsFile = serde_json::from_str(text).map_err(parse_err)?;
    let field = Field::from_label(&f.field)?;
    let mut summands = Vec::new();
    for r in f.rects {
        check_n(f.n, &r.b, "b")?;
        check_n(f.n, &r.d, "d")?;
        let rect = Rectangle::new(r.b, r.d)?;
        summands.extend(std::iter::repeat_n(rect, r.mult));
    }
    match (f.lo, f.hi) {
        (Some(lo), Some(hi)) => {
            check_n(f.n, &lo, "lo")?;
            check_n(f.n, &hi, "hi")?;
            RectDecomp::new(field, GridBox::new(lo, hi)?, summands)
        }
        (None, None) => RectDecomp::tight(field, summands),
        _ => Err(Error::Parse("lo and hi must be given together".into())),
    }
}

/// A 1D barcode in RECTS form.
pub fn barcode_to_json(field: Field, bars: &Barcode) -> String {
    let f = RectsFile {
        field: field.label(),
        n: 1,
        lo: None,
        hi: None,
        rects: bars.iter().map(|(&(b, d), &mult)| RectRecord { b: vec![b], d: vec![d], mult }).collect(),
    };
    serde_json::to_string_pretty(&f).expect("plain data serializes")
}

/// LINE text, optionally with the source box the line is meant to be restricted on.
pub fn line_to_json(line: &AxisEmbedding, domain: Option<&GridBox>) -> String {
    let f = LineFile {
        axis_maps: line
            .maps()
            .iter()
            .map(|m| match m {
                AxisMap::Affine { scale, offset } => MapRecord::Affine { scale: *scale, offset: *offset },
                AxisMap::Table { start, values } => MapRecord::Table { start: *start, values: values.clone() },
            })
            .collect(),
        insert_axis: InsertRecord { pos: line.insert_pos(), value: line.insert_value() },
        domain: domain.map(|b| BoxRecord { lo: b.lo().to_vec(), hi: b.hi().to_vec() }),
    };
    serde_json::to_string_pretty(&f).expect("plain data serializes")
}

pub fn line_from_json(text: &str) -> Result<(AxisEmbedding, Option<GridBox>)> {
    let f: LineFile = serde_json::from_str(text).map_err(parse_err)?;
    let n = f.axis_maps.len();
    let maps = f
        .axis_maps
        .into_iter()
        .map(|m| match m {
            MapRecord::Affine { scale, offset } => AxisMap::Affine { scale, offset },
            MapRecord::Table { start, values } => AxisMap::Table { start, values },
        })
        .collect();
    let line = AxisEmbedding::new(maps, f.insert_axis.pos, f.insert_axis.value)?;
    let domain = match f.domain {
        None => None,
        Some(b) => {
            check_n(n, &b.lo, "domain lo")?;
            check_n(n, &b.hi, "domain hi")?;
            Some(GridBox::new(b.lo, b.hi)?)
        }
    };
    Ok((line, domain))
}

/// Components of a morphism at vertices where both spaces are nonzero.
pub fn morphism_to_value(f: &ModMorphism) -> Value {
    let bx = f.source().grid();
    let comps: Vec<Value> = (0..bx.len())
        .filter(|&i| f.comp(i).rows() > 0 && f.comp(i).cols() > 0)
        .map(|i| serde_json::json!({ "v": bx.vertex(i), "matrix": matrix_rows(f.comp(i)) }))
        .collect();
    serde_json::json!({ "field": f.source().field().label(), "comps": comps })
}
