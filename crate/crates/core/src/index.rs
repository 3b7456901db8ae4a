//! Flat range table: one `(start, end, polygon id)` row per Hilbert range,
//! sorted by start, queried by interval overlap.

use std::collections::{BTreeMap, BTreeSet};

use crate::codec::{check_order, rect_to_intervals, HilbertPolygon, IntervalSet, Rect, Span};
use crate::error::{Error, Result};
use crate::hilbert::{CurveOrder, HilbertIndex};

pub type PolygonId = u64;

/// Sidecar attributes of a polygon.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonMeta {
    pub class_code: String,
    pub certainty: f64,
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
struct Entry {
    meta: PolygonMeta,
    /// Slice of `FeatureTable::by_polygon`.
    first: usize,
    count: usize,
}

/// Immutable columnar range table.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    order: CurveOrder,
    starts: Vec<HilbertIndex>,
    ends: Vec<HilbertIndex>,
    ids: Vec<PolygonId>,
    /// Running maximum of `ends`; non-decreasing, so it can be bisected.
    max_end: Vec<HilbertIndex>,
    /// Longest row, `end - start`.
    max_span: u64,
    /// Row indices grouped by polygon, polygons in id order.
    by_polygon: Vec<usize>,
    polygons: BTreeMap<PolygonId, Entry>,
}

/// Polygons matched by a query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryResult {
    /// Distinct ids, ascending.
    pub ids: Vec<PolygonId>,
    /// Rows of each matched polygon that overlapped the query.
    pub matched: BTreeMap<PolygonId, Vec<Span>>,
}

impl QueryResult {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: PolygonId) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    /// Union of several results.
    pub fn union(results: impl IntoIterator<Item = QueryResult>) -> QueryResult {
        let mut matched: BTreeMap<PolygonId, BTreeSet<Span>> = BTreeMap::new();
        for r in results {
            for (id, rows) in r.matched {
                matched.entry(id).or_default().extend(rows);
            }
        }
        QueryResult {
            ids: matched.keys().copied().collect(),
            matched: matched.into_iter().map(|(id, rows)| (id, rows.into_iter().collect())).collect(),
        }
    }
}

impl FeatureTable {
    pub fn empty(order: CurveOrder) -> Self {
        Self::assemble(order, Vec::new(), BTreeMap::new())
    }

    /// Builds from raw rows and a sidecar, validating every table invariant.
    /// Rows may arrive in any order; they are stably sorted by
    /// `(start, end, id)`.
    pub fn from_rows(
        order: CurveOrder,
        mut rows: Vec<(HilbertIndex, HilbertIndex, PolygonId)>,
        sidecar: BTreeMap<PolygonId, PolygonMeta>,
    ) -> Result<Self> {
        for &(start, end, id) in &rows {
            if start > end || end > order.last_index() {
                return Err(Error::Validation(format!(
                    "row [{start}, {end}] of polygon {id} invalid at order {order}"
                )));
            }
            if !sidecar.contains_key(&id) {
                return Err(Error::Validation(format!("row references unknown polygon {id}")));
            }
        }
        rows.sort_by_key(|&(s, e, id)| (s, e, id));
        let table = Self::assemble(order, rows, sidecar);
        for (&id, entry) in &table.polygons {
            let rows = table.polygon_spans(entry);
            if entry.count == 0 {
                return Err(Error::Validation(format!("polygon {id} has no rows")));
            }
            if rows.windows(2).any(|w| w[0].1 >= w[1].0) {
                return Err(Error::Validation(format!("polygon {id} has overlapping rows")));
            }
        }
        Ok(table)
    }

    fn assemble(
        order: CurveOrder,
        rows: Vec<(HilbertIndex, HilbertIndex, PolygonId)>,
        sidecar: BTreeMap<PolygonId, PolygonMeta>,
    ) -> Self {
        let mut starts = Vec::with_capacity(rows.len());
        let mut ends = Vec::with_capacity(rows.len());
        let mut ids = Vec::with_capacity(rows.len());
        let mut max_end = Vec::with_capacity(rows.len());
        let mut max_span = 0;
        let mut running = 0;
        for &(s, e, id) in &rows {
            starts.push(s);
            ends.push(e);
            ids.push(id);
            running = running.max(e);
            max_end.push(running);
            max_span = max_span.max(e - s);
        }

        let mut grouped: BTreeMap<PolygonId, Vec<usize>> = sidecar.keys().map(|&id| (id, Vec::new())).collect();
        for (row, &id) in ids.iter().enumerate() {
            grouped.get_mut(&id).expect("row id present in sidecar").push(row);
        }
        let mut by_polygon = Vec::with_capacity(rows.len());
        let mut polygons = BTreeMap::new();
        for (id, meta) in sidecar {
            let rows = grouped.remove(&id).unwrap_or_default();
            polygons.insert(id, Entry { meta, first: by_polygon.len(), count: rows.len() });
            by_polygon.extend(rows);
        }
        FeatureTable { order, starts, ends, ids, max_end, max_span, by_polygon, polygons }
    }

    #[inline]
    pub fn order(&self) -> CurveOrder {
        self.order
    }

    pub fn row_count(&self) -> usize {
        self.starts.len()
    }

    pub fn polygon_count(&self) -> usize {
        self.polygons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn row(&self, i: usize) -> (HilbertIndex, HilbertIndex, PolygonId) {
        (self.starts[i], self.ends[i], self.ids[i])
    }

    pub fn rows(&self) -> impl Iterator<Item = (HilbertIndex, HilbertIndex, PolygonId)> + '_ {
        (0..self.row_count()).map(|i| self.row(i))
    }

    /// Polygon ids ascending.
    pub fn polygon_ids(&self) -> impl Iterator<Item = PolygonId> + '_ {
        self.polygons.keys().copied()
    }

    pub fn contains(&self, id: PolygonId) -> bool {
        self.polygons.contains_key(&id)
    }

    pub fn meta(&self, id: PolygonId) -> Option<&PolygonMeta> {
        self.polygons.get(&id).map(|e| &e.meta)
    }

    fn polygon_spans(&self, entry: &Entry) -> Vec<Span> {
        let mut spans: Vec<Span> = self.by_polygon[entry.first..entry.first + entry.count]
            .iter()
            .map(|&r| (self.starts[r], self.ends[r]))
            .collect();
        spans.sort_unstable();
        spans
    }

    /// The polygon's own intervals.
    pub fn intervals(&self, id: PolygonId) -> Option<IntervalSet> {
        let entry = self.polygons.get(&id)?;
        let spans = self.polygon_spans(entry);
        Some(IntervalSet::from_sorted_unchecked(self.order, spans))
    }

    pub fn polygon(&self, id: PolygonId) -> Option<HilbertPolygon> {
        let meta = self.meta(id)?;
        Some(HilbertPolygon {
            id,
            class_code: meta.class_code.clone(),
            certainty: meta.certainty,
            intervals: self.intervals(id)?,
        })
    }

    /// Every polygon, ascending by id.
    pub fn polygons(&self) -> impl Iterator<Item = HilbertPolygon> + '_ {
        self.polygon_ids().map(|id| self.polygon(id).unwrap())
    }

    /// Row index range whose rows may overlap `[lo, hi]`.
    fn candidates(&self, lo: HilbertIndex, hi: HilbertIndex) -> std::ops::Range<usize> {
        let end = self.starts.partition_point(|&s| s <= hi);
        let by_span = self.starts[..end].partition_point(|&s| s.saturating_add(self.max_span) < lo);
        let by_end = self.max_end[..end].partition_point(|&m| m < lo);
        by_span.max(by_end)..end
    }

    /// Polygons with a row overlapping any range of `query`.
    pub fn query_intervals(&self, query: &IntervalSet) -> Result<QueryResult> {
        check_order(self.order, query.order())?;
        let mut matched: BTreeMap<PolygonId, Vec<Span>> = BTreeMap::new();
        for &(lo, hi) in query.ranges() {
            for i in self.candidates(lo, hi) {
                if self.ends[i] >= lo {
                    matched.entry(self.ids[i]).or_default().push((self.starts[i], self.ends[i]));
                }
            }
        }
        for rows in matched.values_mut() {
            rows.sort_unstable();
            rows.dedup();
        }
        Ok(QueryResult { ids: matched.keys().copied().collect(), matched })
    }

    /// Polygons covering at least one cell of `rect`.
    pub fn query_rect(&self, rect: &Rect) -> Result<QueryResult> {
        self.query_intervals(&rect_to_intervals(rect, self.order)?)
    }
}

/// Flattens polygons of one curve order into a table.
pub fn build_table(order: CurveOrder, polygons: impl IntoIterator<Item = HilbertPolygon>) -> Result<FeatureTable> {
    let mut rows = Vec::new();
    let mut sidecar = BTreeMap::new();
    for p in polygons {
        check_order(order, p.order())?;
        if sidecar.contains_key(&p.id) {
            return Err(Error::DuplicateId(p.id));
        }
        rows.extend(p.intervals.ranges().iter().map(|&(s, e)| (s, e, p.id)));
        sidecar.insert(p.id, PolygonMeta { class_code: p.class_code, certainty: p.certainty, name: None });
    }
    FeatureTable::from_rows(order, rows, sidecar)
}
