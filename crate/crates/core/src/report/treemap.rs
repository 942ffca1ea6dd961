//! Squarified treemap layout.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// Lay out `values` (all positive, already in display order) inside
/// `bounds`, each tile's area proportional to its value. Rows are grown
/// along the shorter side while that keeps the worst aspect ratio from
/// getting worse.
pub fn squarify(values: &[f64], bounds: Rect) -> Vec<Rect> {
    let total: f64 = values.iter().sum();
    if values.is_empty() || total <= 0.0 {
        return Vec::new();
    }
    let scale = bounds.area() / total;
    let areas: Vec<f64> = values.iter().map(|v| v * scale).collect();
    let mut out = Vec::with_capacity(values.len());
    let mut free = bounds;
    let mut start = 0;
    while start < areas.len() {
        let side = free.w.min(free.h);
        let mut end = start + 1;
        while end < areas.len() && worst(&areas[start..=end], side) <= worst(&areas[start..end], side) {
            end += 1;
        }
        let row = &areas[start..end];
        let row_area: f64 = row.iter().sum();
        if end == areas.len() {
            // Last row takes whatever is left so the tiles cover the bounds.
            place_row(row, free, &mut out);
            break;
        }
        if free.w >= free.h {
            let strip = row_area / free.h;
            place_row(row, Rect { w: strip, ..free }, &mut out);
            free = Rect { x: free.x + strip, w: free.w - strip, ..free };
        } else {
            let strip = row_area / free.w;
            place_row(row, Rect { h: strip, ..free }, &mut out);
            free = Rect { y: free.y + strip, h: free.h - strip, ..free };
        }
        start = end;
    }
    out
}

fn worst(row: &[f64], side: f64) -> f64 {
    let s: f64 = row.iter().sum();
    let max = row.iter().copied().fold(f64::MIN, f64::max);
    let min = row.iter().copied().fold(f64::MAX, f64::min);
    let s2 = s * s;
    let side2 = side * side;
    (side2 * max / s2).max(s2 / (side2 * min))
}

/// Fill `strip` with `row`, stacking across its longer side.
fn place_row(row: &[f64], strip: Rect, out: &mut Vec<Rect>) {
    let total: f64 = row.iter().sum();
    let mut offset = 0.0;
    for (i, a) in row.iter().enumerate() {
        let share = a / total;
        let last = i + 1 == row.len();
        if strip.w >= strip.h {
            let w = if last { strip.w - offset } else { strip.w * share };
            out.push(Rect { x: strip.x + offset, y: strip.y, w, h: strip.h });
            offset += w;
        } else {
            let h = if last { strip.h - offset } else { strip.h * share };
            out.push(Rect { x: strip.x, y: strip.y + offset, w: strip.w, h });
            offset += h;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn areas_are_proportional_and_cover_bounds() {
        let values = [6.0, 6.0, 4.0, 3.0, 2.0, 2.0, 1.0];
        let bounds = Rect { x: 0.0, y: 0.0, w: 600.0, h: 400.0 };
        let rects = squarify(&values, bounds);
        let total: f64 = values.iter().sum();
        let mut covered = 0.0;
        for (v, r) in values.iter().zip(&rects) {
            assert!((r.area() / bounds.area() - v / total).abs() < 1e-9);
            assert!(r.x >= -1e-9 && r.y >= -1e-9 && r.x + r.w <= 600.0 + 1e-9 && r.y + r.h <= 400.0 + 1e-9);
            covered += r.area();
        }
        assert!((covered - bounds.area()).abs() < 1e-6);
    }

    #[test]
    fn single_value_fills_bounds() {
        let bounds = Rect { x: 5.0, y: 5.0, w: 10.0, h: 20.0 };
        assert_eq!(squarify(&[3.0], bounds), vec![bounds]);
        assert!(squarify(&[], bounds).is_empty());
    }
}
