//! Output writers: stage-probability CSV, Sankey flow JSON and SVG,
//! coefficient and diagnostics dumps, score tables.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matchmodels::{CoefficientMap, ModelFamily, TeamDiagnostics};
use crate::scoring::ScoreReport;
use crate::tournament::{StageDistribution, N_OUTCOMES};

/// Provenance written as `#` comment lines at the top of every randomized output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub model: String,
    pub seed: u64,
    pub replications: u64,
    pub elo_update: bool,
    pub preset: Option<String>,
}

impl RunMetadata {
    fn header(&self) -> String {
        let mut s = format!(
            "# model={} seed={} n={} elo_update={}",
            self.model, self.seed, self.replications, self.elo_update
        );
        if let Some(p) = &self.preset {
            let _ = write!(s, " preset={p}");
        }
        s.push('\n');
        s
    }
}

/// Column meaning of a stage table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageEncoding {
    /// Probability of reaching each stage; the last column is the group exit.
    Cumulative,
    /// Probability of each of the six exit levels.
    Exclusive,
}

impl StageEncoding {
    pub fn columns(self) -> [&'static str; N_OUTCOMES] {
        match self {
            Self::Cumulative => ["champion", "final", "semi", "quarter", "r16", "prelim"],
            Self::Exclusive => ["champion", "lost_final", "out_semi", "out_quarter", "out_r16", "out_group"],
        }
    }
}

/// Rows ordered by [`StageDistribution::ranking`].
pub fn stage_csv(dist: &StageDistribution, encoding: StageEncoding, meta: &RunMetadata) -> String {
    let mut out = meta.header();
    let _ = writeln!(out, "# encoding={}", match encoding {
        StageEncoding::Cumulative => "cumulative",
        StageEncoding::Exclusive => "exclusive",
    });
    out.push_str("team");
    for c in encoding.columns() {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for i in dist.ranking() {
        let p = match encoding {
            StageEncoding::Cumulative => dist.reach(i),
            StageEncoding::Exclusive => dist.probs(i),
        };
        out.push_str(&dist.teams[i]);
        for v in p {
            let _ = write!(out, ",{v:.6}");
        }
        out.push('\n');
    }
    out
}

/// Parses a stage CSV back to `(team, six values)` rows.
pub fn parse_stage_csv(text: &str) -> Result<Vec<(String, [f64; N_OUTCOMES])>> {
    let mut rows = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != N_OUTCOMES + 1 {
            return Err(Error::InvalidInput(format!("stage row `{line}` has {} fields", f.len())));
        }
        let mut p = [0.0; N_OUTCOMES];
        for (k, v) in f[1..].iter().enumerate() {
            p[k] = v
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad probability `{v}` in `{line}`")))?;
        }
        rows.push((f[0].to_string(), p));
    }
    Ok(rows)
}

pub const SANKEY_STAGES: [&str; 6] = ["Group", "R16", "QF", "SF", "Final", "Champion"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SankeyNode {
    pub id: String,
    /// `None` for a drop-out sink.
    pub team: Option<String>,
    pub stage: String,
    pub column: usize,
    /// Probability mass flowing into the node (1 for group nodes).
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SankeyLink {
    pub source: usize,
    pub target: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sankey {
    pub metadata: RunMetadata,
    pub nodes: Vec<SankeyNode>,
    pub links: Vec<SankeyLink>,
}

/// Team nodes per stage column, each linked to the team's node in the next
/// column and to that stage's drop-out sink. Zero-mass nodes and links are left out.
pub fn sankey(dist: &StageDistribution, meta: &RunMetadata) -> Sankey {
    let n_teams = dist.teams.len();
    let reach: Vec<[f64; N_OUTCOMES]> = (0..n_teams).map(|i| dist.reach(i)).collect();
    // mass at column c: group 1, then reach R16, QF, SF, final, champion
    let mass = |i: usize, c: usize| -> f64 {
        match c {
            0 => 1.0,
            _ => reach[i][5 - c],
        }
    };
    let probs: Vec<[f64; N_OUTCOMES]> = (0..n_teams).map(|i| dist.probs(i)).collect();
    // exiting from column c (c < 5): exit code 6 - c
    let exit = |i: usize, c: usize| probs[i][5 - c];

    let mut nodes = Vec::new();
    let mut links = Vec::new();
    let mut index = vec![[usize::MAX; 6]; n_teams];
    let mut sinks = [usize::MAX; 5];

    for c in 0..6 {
        let mut order: Vec<usize> = (0..n_teams).filter(|&i| mass(i, c) > 0.0).collect();
        order.sort_by(|&a, &b| mass(b, c).total_cmp(&mass(a, c)).then_with(|| dist.teams[a].cmp(&dist.teams[b])));
        for i in order {
            index[i][c] = nodes.len();
            nodes.push(SankeyNode {
                id: format!("{}@{}", dist.teams[i], SANKEY_STAGES[c]),
                team: Some(dist.teams[i].clone()),
                stage: SANKEY_STAGES[c].to_string(),
                column: c,
                value: mass(i, c),
            });
        }
        if c > 0 {
            let total: f64 = (0..n_teams).map(|i| exit(i, c - 1)).sum();
            sinks[c - 1] = nodes.len();
            nodes.push(SankeyNode {
                id: format!("out@{}", SANKEY_STAGES[c - 1]),
                team: None,
                stage: format!("out in {}", SANKEY_STAGES[c - 1]),
                column: c,
                value: total,
            });
        }
    }
    for c in 0..5 {
        for i in 0..n_teams {
            let src = index[i][c];
            if src == usize::MAX {
                continue;
            }
            let on = mass(i, c + 1);
            if on > 0.0 {
                links.push(SankeyLink {
                    source: src,
                    target: index[i][c + 1],
                    value: on,
                });
            }
            let off = exit(i, c);
            if off > 0.0 {
                links.push(SankeyLink {
                    source: src,
                    target: sinks[c],
                    value: off,
                });
            }
        }
    }
    Sankey {
        metadata: meta.clone(),
        nodes,
        links,
    }
}

/// Pixels per unit of probability mass, for node heights and link widths.
pub const SVG_UNIT: f64 = 20.0;
const SVG_GAP: f64 = 3.0;
const SVG_NODE_W: f64 = 12.0;
const SVG_COL_STEP: f64 = 240.0;
const SVG_MARGIN: f64 = 20.0;

/// Renders the Sankey JSON; link stroke width is `SVG_UNIT * value`.
pub fn sankey_svg(s: &Sankey) -> String {
    let mut y = vec![0.0; s.nodes.len()];
    let mut col_height = [0.0f64; 6];
    for (k, n) in s.nodes.iter().enumerate() {
        y[k] = SVG_MARGIN + col_height[n.column];
        col_height[n.column] += n.value * SVG_UNIT + SVG_GAP;
    }
    let height = col_height.iter().cloned().fold(0.0, f64::max) + 2.0 * SVG_MARGIN;
    let width = 5.0 * SVG_COL_STEP + SVG_NODE_W + 2.0 * SVG_MARGIN + 120.0;
    let x = |c: usize| SVG_MARGIN + c as f64 * SVG_COL_STEP;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" font-family=\"sans-serif\" font-size=\"9\">"
    );
    let m = &s.metadata;
    let _ = writeln!(
        out,
        "<!-- model={} seed={} n={} elo_update={} -->",
        m.model, m.seed, m.replications, m.elo_update
    );
    let mut out_off = vec![0.0; s.nodes.len()];
    let mut in_off = vec![0.0; s.nodes.len()];
    for (k, l) in s.links.iter().enumerate() {
        let w = l.value * SVG_UNIT;
        let (a, b) = (&s.nodes[l.source], &s.nodes[l.target]);
        let x0 = x(a.column) + SVG_NODE_W;
        let x1 = x(b.column);
        let y0 = y[l.source] + out_off[l.source] + w / 2.0;
        let y1 = y[l.target] + in_off[l.target] + w / 2.0;
        out_off[l.source] += w;
        in_off[l.target] += w;
        let xm = (x0 + x1) / 2.0;
        let colour = if b.team.is_some() { "#4a7fb5" } else { "#c0c0c0" };
        let _ = writeln!(
            out,
            "<path id=\"link{k}\" data-value=\"{:.6}\" d=\"M{x0:.2},{y0:.3} C{xm:.2},{y0:.3} {xm:.2},{y1:.3} {x1:.2},{y1:.3}\" fill=\"none\" stroke=\"{colour}\" stroke-opacity=\"0.45\" stroke-width=\"{w:.4}\"/>",
            l.value
        );
    }
    for (k, n) in s.nodes.iter().enumerate() {
        let h = n.value * SVG_UNIT;
        let fill = if n.team.is_some() { "#1f3f66" } else { "#808080" };
        let _ = writeln!(
            out,
            "<rect id=\"node{k}\" x=\"{:.2}\" y=\"{:.3}\" width=\"{SVG_NODE_W}\" height=\"{h:.4}\" fill=\"{fill}\"/>",
            x(n.column),
            y[k]
        );
        if h >= 6.0 {
            let label = n.team.as_deref().unwrap_or(&n.stage);
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.3}\" dominant-baseline=\"middle\">{}</text>",
                x(n.column) + SVG_NODE_W + 3.0,
                y[k] + h / 2.0,
                xml_escape(label)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn coefficients_json(coeffs: &CoefficientMap) -> Result<String> {
    Ok(serde_json::to_string_pretty(coeffs)? + "\n")
}

pub fn parse_coefficients_json(text: &str) -> Result<CoefficientMap> {
    Ok(serde_json::from_str(text)?)
}

pub fn diagnostics_json(diag: &[TeamDiagnostics]) -> Result<String> {
    Ok(serde_json::to_string_pretty(diag)? + "\n")
}

/// One row per team: deviance p-values, goodness-of-fit p-values, AICs.
pub fn diagnostics_csv(diag: &[TeamDiagnostics]) -> String {
    let mut out = String::from(
        "team,n_matches,attack_null_dev,attack_resid_dev,attack_p,defense_null_dev,defense_resid_dev,defense_p,\
         attack_gof_p,defense_gof_p,nested_p,bivariate_aic,inflated_aic,inflation_p\n",
    );
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.6}"));
    for d in diag {
        let dev = |r: &Option<crate::glm::DevianceReport>| {
            (
                opt(r.as_ref().map(|r| r.null_deviance)),
                opt(r.as_ref().map(|r| r.residual_deviance)),
                opt(r.as_ref().map(|r| r.p_value)),
            )
        };
        let (an, ar, ap) = dev(&d.attack_deviance);
        let (dn, dr, dp) = dev(&d.defense_deviance);
        let _ = writeln!(
            out,
            "{},{},{an},{ar},{ap},{dn},{dr},{dp},{},{},{},{},{},{}",
            d.team,
            d.n_matches,
            opt(d.attack_gof.as_ref().map(|g| g.p_value)),
            opt(d.defense_gof.as_ref().map(|g| g.p_value)),
            opt(d.nested_deviance.as_ref().map(|r| r.p_value)),
            opt(d.bivariate_aic),
            opt(d.inflated_aic),
            opt(d.inflation.map(|i| i.p)),
        );
    }
    out
}

/// Rows are model families, columns the four total scores.
pub fn score_csv(rows: &[(ModelFamily, ScoreReport)], meta: Option<&RunMetadata>) -> String {
    let mut out = meta.map(RunMetadata::header).unwrap_or_default();
    if let Some((_, r)) = rows.first() {
        let _ = writeln!(out, "# rps={}", match r.rps_variant {
            crate::scoring::RpsVariant::Cumulative => "cumulative",
            crate::scoring::RpsVariant::Literal => "literal",
        });
    }
    out.push_str("model,E1,E2,Brier,RPS\n");
    for (f, r) in rows {
        let _ = writeln!(out, "{},{:.0},{:.4},{:.4},{:.4}", f.label(), r.e1, r.e2, r.brier, r.rps);
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
