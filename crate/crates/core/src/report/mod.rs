//! Static SVG and HTML views of run records.
//!
//! Every function here reads only [`RunRecord`]s, so rendering the same
//! records twice gives byte-identical output. Numbers printed in text are
//! the record's values as stored; geometry is derived from them.

mod treemap;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::harness::{load_sweep, rank_actions, stage_name, HarnessError, RunRecord, Sweep};
use crate::metrics::METRIC_NAMES;

pub use treemap::{squarify, Rect};

pub const DEFAULT_TOP_TERMS: usize = 10;
pub const DEFAULT_TOP_TOPICS: usize = 5;
pub const DEFAULT_TOP_DOCS: usize = 5;

const PALETTE: [&str; 10] =
    ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"];
const LOW: (f64, f64, f64) = (222.0, 235.0, 247.0);
const HIGH: (f64, f64, f64) = (8.0, 81.0, 156.0);

/// What to render from a sweep directory.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportSpec {
    pub sweep_dir: PathBuf,
    pub runs: Vec<String>,
    pub n_top_terms: usize,
    pub n_top_topics: usize,
    pub n_top_docs: usize,
}

impl ReportSpec {
    /// Baseline plus the lowest, median and highest impact ok runs.
    pub fn default_for(sweep_dir: &Path, sweep: &Sweep) -> Self {
        let mut runs = vec![sweep.baseline.run_id.clone()];
        let ranked = rank_actions(&sweep.runs);
        if !ranked.is_empty() {
            let n = ranked.len();
            for i in [n - 1, (n - 1) / 2, 0] {
                if !runs.contains(&ranked[i].run_id) {
                    runs.push(ranked[i].run_id.clone());
                }
            }
        }
        Self {
            sweep_dir: sweep_dir.to_path_buf(),
            runs,
            n_top_terms: DEFAULT_TOP_TERMS,
            n_top_topics: DEFAULT_TOP_TOPICS,
            n_top_docs: DEFAULT_TOP_DOCS,
        }
    }
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

/// Coordinates at fixed precision.
fn c(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn svg_open(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"11\">\n",
        c(w),
        c(h)
    )
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "n/a".into())
}

// ---------------------------------------------------------------- pie

#[derive(Clone, Debug, PartialEq)]
pub struct PieSlice {
    pub topic: usize,
    pub count: usize,
    /// Degrees clockwise from twelve o'clock.
    pub start: f64,
    pub angle: f64,
}

/// One slice per nonempty topic, in topic order, angle proportional to the
/// topic's document count.
pub fn pie_slices(record: &RunRecord) -> Vec<PieSlice> {
    let total: usize = record.topic_sizes.iter().sum();
    let mut start = 0.0;
    let mut slices = Vec::new();
    for (topic, &count) in record.topic_sizes.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let angle = 360.0 * count as f64 / total as f64;
        slices.push(PieSlice { topic, count, start, angle });
        start += angle;
    }
    slices
}

fn polar(cx: f64, cy: f64, r: f64, deg: f64) -> (f64, f64) {
    let rad = deg.to_radians();
    (cx + r * rad.sin(), cy - r * rad.cos())
}

pub fn render_topic_pie(record: &RunRecord) -> String {
    let slices = pie_slices(record);
    let (w, h, cx, cy, r) = (420.0, 320.0, 160.0, 160.0, 130.0);
    let mut s = svg_open(w, h);
    let _ = writeln!(s, "<title>Documents per topic, {}</title>", esc(&record.run_id));
    if let [only] = slices.as_slice() {
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"white\"><title>topic {} ({})</title></circle>",
            c(cx),
            c(cy),
            c(r),
            PALETTE[only.topic % PALETTE.len()],
            only.topic,
            only.count
        );
    } else {
        for sl in &slices {
            let (x0, y0) = polar(cx, cy, r, sl.start);
            let (x1, y1) = polar(cx, cy, r, sl.start + sl.angle);
            let large = u8::from(sl.angle > 180.0);
            let _ = writeln!(
                s,
                "<path d=\"M{} {} L{} {} A{} {} 0 {} 1 {} {} Z\" fill=\"{}\" stroke=\"white\"><title>topic {} ({})</title></path>",
                c(cx),
                c(cy),
                c(x0),
                c(y0),
                c(r),
                c(r),
                large,
                c(x1),
                c(y1),
                PALETTE[sl.topic % PALETTE.len()],
                sl.topic,
                sl.count
            );
        }
    }
    // Legend for the largest slices.
    let mut by_size = slices.clone();
    by_size.sort_by(|a, b| b.count.cmp(&a.count).then(a.topic.cmp(&b.topic)));
    for (i, sl) in by_size.iter().take(18).enumerate() {
        let y = 20.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            "<rect x=\"310\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/><text x=\"325\" y=\"{}\">topic {} ({})</text>",
            c(y),
            PALETTE[sl.topic % PALETTE.len()],
            c(y + 9.0),
            sl.topic,
            sl.count
        );
    }
    s.push_str("</svg>\n");
    s
}

// ------------------------------------------------------- term-topic matrix

/// The slice of a record's term-topic table that the matrix view shows.
#[derive(Clone, Debug, PartialEq)]
pub struct TermTopicView {
    pub terms: Vec<String>,
    /// Largest topics by document count; ties by topic id.
    pub topics: Vec<usize>,
    /// `cells[i][j]`: posterior of `terms[i]` in `topics[j]`.
    pub cells: Vec<Vec<f64>>,
}

/// Topic ids ordered by document count, largest first.
pub fn largest_topics(record: &RunRecord, n: usize) -> Vec<usize> {
    let mut topics: Vec<usize> = (0..record.topic_sizes.len()).collect();
    topics.sort_by(|&a, &b| record.topic_sizes[b].cmp(&record.topic_sizes[a]).then(a.cmp(&b)));
    topics.truncate(n);
    topics
}

pub fn term_topic_view(record: &RunRecord, n_terms: usize, n_topics: usize) -> TermTopicView {
    let topics = largest_topics(record, n_topics);
    let rows = n_terms.min(record.term_topic.terms.len());
    TermTopicView {
        terms: record.term_topic.terms[..rows].to_vec(),
        cells: record.term_topic.phi[..rows].iter().map(|row| topics.iter().map(|&t| row[t]).collect()).collect(),
        topics,
    }
}

/// Circles sized by area: radius ∝ sqrt(phi / max phi shown).
pub fn render_term_topic_matrix(record: &RunRecord, n_terms: usize, n_topics: usize) -> String {
    let view = term_topic_view(record, n_terms, n_topics);
    let cell = 44.0;
    let (left, top) = (110.0, 40.0);
    let w = left + cell * view.topics.len() as f64 + 20.0;
    let h = top + cell * view.terms.len() as f64 + 20.0;
    let max = view.cells.iter().flatten().copied().fold(0.0, f64::max);
    let mut s = svg_open(w, h);
    let _ = writeln!(s, "<title>Top terms across the largest topics, {}</title>", esc(&record.run_id));
    for (j, t) in view.topics.iter().enumerate() {
        let x = left + cell * (j as f64 + 0.5);
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">topic {}</text>", c(x), c(top - 12.0), t);
    }
    for (i, term) in view.terms.iter().enumerate() {
        let y = top + cell * (i as f64 + 0.5);
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>", c(left - 8.0), c(y + 4.0), esc(term));
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#eeeeee\"/>",
            c(left),
            c(y),
            c(w - 20.0),
            c(y)
        );
        for (j, &p) in view.cells[i].iter().enumerate() {
            if p <= 0.0 || max <= 0.0 {
                continue;
            }
            let r = 0.45 * cell * (p / max).sqrt();
            let x = left + cell * (j as f64 + 0.5);
            let _ = writeln!(
                s,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#4e79a7\"><title>{} in topic {}: {}</title></circle>",
                c(x),
                c(y),
                c(r),
                esc(term),
                view.topics[j],
                p
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

// -------------------------------------------------------------- top lists

/// Per topic, the ranked document ids and terms shown in the lists view.
/// Topics without documents get empty lists.
pub fn top_lists(record: &RunRecord, topics: &[usize], n_docs: usize, n_terms: usize) -> Vec<(usize, Vec<String>, Vec<String>)> {
    topics
        .iter()
        .map(|&t| {
            if record.topic_sizes.get(t).copied().unwrap_or(0) == 0 {
                return (t, Vec::new(), Vec::new());
            }
            let docs = record.top_docs[t].iter().take(n_docs).map(|r| r.id.clone()).collect();
            let terms = record.top_terms[t].iter().take(n_terms).map(|r| r.id.clone()).collect();
            (t, docs, terms)
        })
        .collect()
}

pub fn render_top_lists(record: &RunRecord, topics: &[usize], n_docs: usize, n_terms: usize) -> String {
    let mut s = String::from("<div class=\"top-lists\">\n");
    for (t, docs, terms) in top_lists(record, topics, n_docs, n_terms) {
        let size = record.topic_sizes.get(t).copied().unwrap_or(0);
        let _ = writeln!(s, "<section><h3>topic {t} ({size} documents)</h3>");
        s.push_str("<h4>documents</h4><ol>");
        for d in docs {
            let _ = write!(s, "<li>{}</li>", esc(&d));
        }
        s.push_str("</ol>\n<h4>terms</h4><ol>");
        for w in terms {
            let _ = write!(s, "<li>{}</li>", esc(&w));
        }
        s.push_str("</ol></section>\n");
    }
    s.push_str("</div>\n");
    s
}

// ---------------------------------------------------------------- treemap

#[derive(Clone, Debug, PartialEq)]
pub struct InnerTile {
    pub label: String,
    pub count: usize,
    pub mean_probability: f64,
    pub rect: Rect,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OuterTile {
    pub topic: usize,
    pub size: usize,
    pub rect: Rect,
    pub classes: Vec<InnerTile>,
}

/// Nested layout: predicted topics outside, reference classes inside. Both
/// levels are ordered by size descending, then id.
pub fn treemap_layout(record: &RunRecord, bounds: Rect) -> Vec<OuterTile> {
    let mut topics: Vec<_> = record.composition.iter().filter(|t| t.size > 0).collect();
    topics.sort_by(|a, b| b.size.cmp(&a.size).then(a.topic.cmp(&b.topic)));
    let sizes: Vec<f64> = topics.iter().map(|t| t.size as f64).collect();
    let rects = squarify(&sizes, bounds);
    topics
        .iter()
        .zip(rects)
        .map(|(t, rect)| {
            // Classes are stored count-descending, then label.
            let counts: Vec<f64> = t.classes.iter().map(|c| c.count as f64).collect();
            let inner = squarify(&counts, rect);
            OuterTile {
                topic: t.topic,
                size: t.size,
                rect,
                classes: t
                    .classes
                    .iter()
                    .zip(inner)
                    .map(|(c, rect)| InnerTile {
                        label: c.label.clone(),
                        count: c.count,
                        mean_probability: c.mean_probability,
                        rect,
                    })
                    .collect(),
            }
        })
        .collect()
}

fn ramp(t: f64) -> String {
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(LOW.0, HIGH.0), mix(LOW.1, HIGH.1), mix(LOW.2, HIGH.2))
}

/// Treemap of topic composition, or `None` when the record has no
/// composition to show.
pub fn render_gt_treemap(record: &RunRecord) -> Option<String> {
    let bounds = Rect { x: 10.0, y: 30.0, w: 600.0, h: 400.0 };
    let tiles = treemap_layout(record, bounds);
    if tiles.is_empty() {
        return None;
    }
    let probs = tiles.iter().flat_map(|t| t.classes.iter().map(|c| c.mean_probability));
    let (lo, hi) = probs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p), hi.max(p)));
    let norm = |p: f64| if hi > lo { (p - lo) / (hi - lo) } else { 1.0 };
    let mut s = svg_open(620.0, 490.0);
    let _ = writeln!(s, "<title>Reference classes within predicted topics, {}</title>", esc(&record.run_id));
    for t in &tiles {
        for inner in &t.classes {
            let r = inner.rect;
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"white\" stroke-width=\"0.5\"><title>topic {}: {} ({}), mean probability {}</title></rect>",
                c(r.x),
                c(r.y),
                c(r.w),
                c(r.h),
                ramp(norm(inner.mean_probability)),
                t.topic,
                esc(&inner.label),
                inner.count,
                inner.mean_probability
            );
        }
    }
    for t in &tiles {
        let r = t.rect;
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"white\" stroke-width=\"4\"><title>topic {} ({})</title></rect>",
            c(r.x),
            c(r.y),
            c(r.w),
            c(r.h),
            t.topic,
            t.size
        );
        if r.w > 50.0 && r.h > 16.0 {
            let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" fill=\"white\">topic {}</text>", c(r.x + 4.0), c(r.y + 13.0), t.topic);
        }
    }
    // Legend: min-max of mean membership probability in this figure.
    let _ = writeln!(
        s,
        "<defs><linearGradient id=\"ramp\"><stop offset=\"0\" stop-color=\"{}\"/><stop offset=\"1\" stop-color=\"{}\"/></linearGradient></defs>",
        ramp(0.0),
        ramp(1.0)
    );
    let _ = writeln!(s, "<rect x=\"10\" y=\"448\" width=\"200\" height=\"12\" fill=\"url(#ramp)\"/>");
    let _ = writeln!(s, "<text x=\"10\" y=\"476\">{lo}</text>");
    let _ = writeln!(s, "<text x=\"210\" y=\"476\" text-anchor=\"end\">{hi}</text>");
    let _ = writeln!(s, "<text x=\"220\" y=\"458\">mean membership probability (min to max)</text>");
    let _ = writeln!(s, "<text x=\"10\" y=\"20\">outer tiles: predicted topics; inner tiles: reference classes</text>");
    s.push_str("</svg>\n");
    Some(s)
}

// ------------------------------------------------------------ impact plot

/// Action kinds in display order.
const KIND_ORDER: [&str; 9] = [
    "toggle-stop-removal",
    "perturb-stop-list",
    "toggle-stemming",
    "remove-rare-terms",
    "remove-ubiquitous-terms",
    "remove-documents",
    "set-num-topics",
    "split-topic",
    "merge-topics",
];

/// Kinds present among scored records, in display order; unknown kinds
/// (such as the baseline) go last in name order.
pub fn impact_groups(records: &[RunRecord]) -> Vec<&'static str> {
    let mut kinds: Vec<&'static str> = records.iter().filter(|r| r.s_r.is_some()).map(|r| r.kind()).collect();
    kinds.sort_by_key(|k| (KIND_ORDER.iter().position(|o| o == k).unwrap_or(KIND_ORDER.len()), *k));
    kinds.dedup();
    kinds
}

/// Dot plot of impact by action kind with a red reference line at zero.
pub fn render_impact_plot(records: &[RunRecord]) -> String {
    let groups = impact_groups(records);
    let (left, top, band, plot_h) = (50.0, 20.0, 90.0, 300.0);
    let w = left + band * groups.len().max(1) as f64 + 20.0;
    let h = top + plot_h + 90.0;
    let y_max = records.iter().filter_map(|r| r.s_r).fold(0.0, f64::max);
    let y_top = if y_max > 0.0 { y_max } else { 1.0 };
    let y = |v: f64| top + plot_h * (1.0 - v / y_top);
    let mut s = svg_open(w, h);
    s.push_str("<title>Impact score by action kind</title>\n");
    for i in 0..=4 {
        let v = y_top * i as f64 / 4.0;
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/><text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            c(left),
            c(y(v)),
            c(w - 20.0),
            c(y(v)),
            c(left - 4.0),
            c(y(v) + 4.0),
            format!("{v:.3}")
        );
    }
    for (g, kind) in groups.iter().enumerate() {
        let x0 = left + band * g as f64;
        let members: Vec<&RunRecord> = records.iter().filter(|r| r.kind() == *kind && r.s_r.is_some()).collect();
        for (i, r) in members.iter().enumerate() {
            let spread = if members.len() > 1 { i as f64 / (members.len() - 1) as f64 } else { 0.5 };
            let x = x0 + band * (0.25 + 0.5 * spread);
            let v = r.s_r.unwrap_or(0.0);
            let _ = writeln!(
                s,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"#4e79a7\" fill-opacity=\"0.8\"><title>{}: {}</title></circle>",
                c(x),
                c(y(v)),
                esc(&r.run_id),
                v
            );
        }
        let lx = x0 + band * 0.5;
        let ly = top + plot_h + 14.0;
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" transform=\"rotate(-35 {} {})\">{}</text>",
            c(lx),
            c(ly),
            c(lx),
            c(ly),
            kind
        );
    }
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"red\" stroke-width=\"1.5\"/>",
        c(left),
        c(y(0.0)),
        c(w - 20.0),
        c(y(0.0))
    );
    let _ = writeln!(s, "<text x=\"12\" y=\"{}\" transform=\"rotate(-90 12 {})\">S_r</text>", c(top + plot_h / 2.0), c(top + plot_h / 2.0));
    s.push_str("</svg>\n");
    s
}

// ------------------------------------------------------------------ pages

const STYLE: &str = "body{font-family:sans-serif;margin:2em;max-width:70em}table{border-collapse:collapse}\
td,th{border:1px solid #ccc;padding:2px 6px;text-align:left}.top-lists{display:flex;flex-wrap:wrap;gap:1em}\
.top-lists section{min-width:12em}";

fn page(title: &str, body: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{0}</title><style>{STYLE}</style></head>\n<body>\n<h1>{0}</h1>\n{body}</body></html>\n",
        esc(title)
    )
}

fn metrics_table(record: &RunRecord) -> String {
    let mut s = String::from("<table><tr><th>metric</th><th>value</th></tr>\n");
    let values = record.metrics.map(|m| m.to_array());
    for (i, name) in METRIC_NAMES.iter().enumerate() {
        let _ = writeln!(s, "<tr><td>{name}</td><td>{}</td></tr>", opt(values.map(|v| v[i])));
    }
    let _ = writeln!(s, "<tr><td>S_r</td><td>{}</td></tr>", opt(record.s_r));
    if let Some(d) = record.topic_distances {
        let _ = writeln!(s, "<tr><td>mean KL</td><td>{}</td></tr>", d.mean_kl);
        let _ = writeln!(s, "<tr><td>mean JS similarity</td><td>{}</td></tr>", d.mean_js);
        let _ = writeln!(s, "<tr><td>mean cosine similarity</td><td>{}</td></tr>", d.mean_cosine);
    }
    s.push_str("</table>\n");
    if !record.imputed_metrics.is_empty() {
        let _ = writeln!(s, "<p>copied from baseline: {}</p>", esc(&record.imputed_metrics.join(", ")));
    }
    s
}

fn action_text(record: &RunRecord) -> String {
    serde_json::to_string(&record.action).unwrap_or_default()
}

/// The per-run page and the SVG files it embeds, as `(file name, contents)`.
pub fn render_run(record: &RunRecord, spec: &ReportSpec) -> Vec<(String, String)> {
    let id = &record.run_id;
    let mut files = Vec::new();
    let mut body = String::new();
    let _ = writeln!(
        body,
        "<p>action <code>{}</code>, stage {}, status {}</p>",
        esc(&action_text(record)),
        record.stage.map(stage_name).unwrap_or("baseline"),
        record.status.label()
    );
    body.push_str(&metrics_table(record));
    if record.topic_sizes.is_empty() {
        body.push_str("<p>No model for this run.</p>\n");
    } else {
        files.push((format!("{id}-pie.svg"), render_topic_pie(record)));
        files.push((format!("{id}-matrix.svg"), render_term_topic_matrix(record, spec.n_top_terms, spec.n_top_topics)));
        let _ = writeln!(body, "<h2>Documents per topic</h2><img src=\"{id}-pie.svg\" alt=\"topic sizes\">");
        let _ = writeln!(body, "<h2>Top terms in the largest topics</h2><img src=\"{id}-matrix.svg\" alt=\"term-topic matrix\">");
        body.push_str("<h2>Top documents and terms</h2>\n");
        body.push_str(&render_top_lists(record, &largest_topics(record, spec.n_top_topics), spec.n_top_docs, spec.n_top_terms));
        match render_gt_treemap(record) {
            Some(svg) => {
                files.push((format!("{id}-treemap.svg"), svg));
                let _ = writeln!(body, "<h2>Topic composition</h2><img src=\"{id}-treemap.svg\" alt=\"composition treemap\">");
            }
            None => body.push_str("<p>Composition view skipped: no reference labels.</p>\n"),
        }
    }
    files.push((format!("{id}.html"), page(&format!("Run {id}"), &body)));
    files
}

pub fn render_index(sweep: &Sweep, spec: &ReportSpec) -> String {
    let mut body = String::from("<h2>Selected runs</h2><ul>\n");
    for id in &spec.runs {
        let _ = writeln!(body, "<li><a href=\"{0}.html\">{0}</a></li>", esc(id));
    }
    body.push_str("</ul>\n<h2>Impact by action kind</h2><img src=\"impact.svg\" alt=\"impact plot\">\n");
    body.push_str("<h2>Runs by impact</h2><table><tr><th>run</th><th>kind</th><th>status</th><th>S_r</th></tr>\n");
    let ranked = rank_actions(&sweep.runs);
    let unscored = sweep.runs.iter().filter(|r| r.s_r.is_none());
    for r in ranked.iter().chain(unscored) {
        let _ = writeln!(
            body,
            "<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>",
            esc(&r.run_id),
            r.kind(),
            r.status.label(),
            opt(r.s_r)
        );
    }
    body.push_str("</table>\n");
    page("Sweep report", &body)
}

/// Every file of the report, as `(file name, contents)`.
pub fn render_report(sweep: &Sweep, spec: &ReportSpec) -> Result<Vec<(String, String)>, HarnessError> {
    let mut files = vec![("index.html".to_string(), render_index(sweep, spec))];
    let mut all: Vec<RunRecord> = vec![sweep.baseline.clone()];
    all.extend(sweep.runs.iter().cloned());
    files.push(("impact.svg".to_string(), render_impact_plot(&sweep.runs)));
    for id in &spec.runs {
        let record = all
            .iter()
            .find(|r| &r.run_id == id)
            .ok_or_else(|| HarnessError::Plan(format!("run {id} not found in {}", spec.sweep_dir.display())))?;
        files.extend(render_run(record, spec));
    }
    Ok(files)
}

/// Render the default report for a sweep directory into `<dir>/report/`.
pub fn write_report(sweep_dir: &Path) -> Result<PathBuf, HarnessError> {
    let sweep = load_sweep(sweep_dir)?;
    let spec = ReportSpec::default_for(sweep_dir, &sweep);
    let out = sweep_dir.join("report");
    fs::create_dir_all(&out).map_err(|source| HarnessError::Io { path: out.clone(), source })?;
    for (name, text) in render_report(&sweep, &spec)? {
        let path = out.join(name);
        fs::write(&path, text).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    }
    Ok(out.join("index.html"))
}
