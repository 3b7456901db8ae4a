//! Representation statistics: vertex points versus Hilbert ranges per polygon.

use std::fmt;

use serde::Serialize;

use crate::codec::hilbert_to_polygon;
use crate::index::FeatureTable;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StatsReport {
    pub polygon_count: u64,
    pub total_vertex_points: u64,
    pub total_hilbert_ranges: u64,
    /// `None` when there are no polygons.
    pub points_per_polygon: Option<f64>,
    pub ranges_per_polygon: Option<f64>,
    pub base_order: u8,
}

impl StatsReport {
    pub fn from_totals(
        base_order: u8,
        polygon_count: u64,
        total_vertex_points: u64,
        total_hilbert_ranges: u64,
    ) -> Self {
        let ratio = |total: u64| (polygon_count > 0).then(|| total as f64 / polygon_count as f64);
        StatsReport {
            polygon_count,
            total_vertex_points,
            total_hilbert_ranges,
            points_per_polygon: ratio(total_vertex_points),
            ranges_per_polygon: ratio(total_hilbert_ranges),
            base_order,
        }
    }

    /// Counts over a level-0 table. Vertex points are those of the outlines
    /// reconstructed from the ranges, over all rings of all components.
    pub fn compute(table: &FeatureTable) -> Self {
        let (mut points, mut ranges) = (0u64, 0u64);
        for polygon in table.polygons() {
            ranges += polygon.intervals.len() as u64;
            points += hilbert_to_polygon::<f64>(&polygon).iter().map(|p| p.vertex_count() as u64).sum::<u64>();
        }
        Self::from_totals(table.order().get(), table.polygon_count() as u64, points, ranges)
    }
}

fn ratio_text(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a".to_string(), |v| format!("{v:.1}"))
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "polygonCount: {}", self.polygon_count)?;
        writeln!(f, "totalVertexPoints: {}", self.total_vertex_points)?;
        writeln!(f, "totalHilbertRanges: {}", self.total_hilbert_ranges)?;
        writeln!(f, "pointsPerPolygon: {}", ratio_text(self.points_per_polygon))?;
        writeln!(f, "rangesPerPolygon: {}", ratio_text(self.ranges_per_polygon))?;
        write!(f, "baseOrder: {}", self.base_order)
    }
}
