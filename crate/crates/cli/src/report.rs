//! Static HTML view of a thread with one colored bar per comment.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use infotypes::corpus::{InfoType, IssueThread};
use infotypes::{Error, Result};

/// Fixed color per information type, indexed by ordinal.
pub const PALETTE: [&str; InfoType::COUNT] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#e7ba52", "#637939", "#843c39", "#7b4173", "#a55194",
];

const UNLABELED: &str = "#dddddd";

fn escape(s: &str) -> String {
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

const STYLE: &str = "body{font-family:sans-serif;margin:2em;color:#222}\
.comment{display:flex;align-items:center;margin:2px 0}\
.author{width:12em;font-size:12px;overflow:hidden;text-overflow:ellipsis;white-space:nowrap}\
.bar{display:flex;flex:1;min-height:4px}\
.seg{flex:1;border-right:1px solid #fff}\
.legend{list-style:none;padding:0;display:flex;flex-wrap:wrap}\
.legend-item{margin:0 1em 4px 0;font-size:12px}\
.swatch{display:inline-block;width:12px;height:12px;margin-right:4px;vertical-align:middle}\
table{border-collapse:collapse;margin-top:1em}td,th{border:1px solid #ccc;padding:2px 8px}";

/// Renders `thread` with one label per sentence in thread order. `None`
/// marks a sentence without a label.
pub fn render_html(thread: &IssueThread, labels: &[Option<InfoType>]) -> Result<String> {
    if labels.is_empty() {
        return Err(Error::InvalidInput("no labels to render".into()));
    }
    if labels.len() != thread.sentence_count() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} sentences",
            labels.len(),
            thread.sentence_count()
        )));
    }
    let mut counts = [0usize; InfoType::COUNT];
    let mut unlabeled = 0;
    for l in labels {
        match l {
            Some(t) => counts[t.ordinal()] += 1,
            None => unlabeled += 1,
        }
    }

    let title = escape(&format!("{} {}", thread.display_id(), thread.title));
    let mut h = String::new();
    let _ = write!(
        h,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n<title>{title}</title>\n<style>{STYLE}</style>\n</head>\n<body>\n<h1>{title}</h1>\n"
    );

    h.push_str("<ul class=\"legend\">\n");
    for t in InfoType::ALL {
        let _ = writeln!(
            h,
            "<li class=\"legend-item\"><span class=\"swatch\" style=\"background:{}\"></span>{}</li>",
            PALETTE[t.ordinal()],
            escape(t.display_name())
        );
    }
    h.push_str("</ul>\n<div class=\"thread\">\n");

    let mut next = 0;
    for (ci, comment) in thread.comments.iter().enumerate() {
        let n = comment.sentences.len();
        let _ = write!(
            h,
            "<div class=\"comment\"><div class=\"author\">{}</div><div class=\"bar\" style=\"height:{}px\" title=\"comment {ci}\">",
            escape(&comment.author_login),
            4 * n.max(1)
        );
        for s in &comment.sentences {
            let (color, name) = match labels[next] {
                Some(t) => (PALETTE[t.ordinal()], t.display_name()),
                None => (UNLABELED, "unlabeled"),
            };
            let _ = write!(
                h,
                "<span class=\"seg\" style=\"background:{color}\" title=\"{}: {}\"></span>",
                escape(name),
                escape(&s.text_raw)
            );
            next += 1;
        }
        h.push_str("</div></div>\n");
    }
    h.push_str(
        "</div>\n<table class=\"summary\">\n<tr><th>Information type</th><th>Sentences</th></tr>\n",
    );
    for t in InfoType::ALL {
        if counts[t.ordinal()] > 0 {
            let _ = writeln!(
                h,
                "<tr><td>{}</td><td>{}</td></tr>",
                escape(t.display_name()),
                counts[t.ordinal()]
            );
        }
    }
    if unlabeled > 0 {
        let _ = writeln!(h, "<tr><td>unlabeled</td><td>{unlabeled}</td></tr>");
    }
    h.push_str("</table>\n</body>\n</html>\n");
    Ok(h)
}

/// Writes the report to `out`. Nothing is written when rendering fails.
pub fn render_report(
    thread: &IssueThread,
    labels: &[Option<InfoType>],
    out: impl AsRef<Path>,
) -> Result<()> {
    let html = render_html(thread, labels)?;
    let out = out.as_ref();
    fs::write(out, html).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })
}

/// Gold labels in thread order: a sentence's first label, if any.
pub fn gold_labels(thread: &IssueThread) -> Vec<Option<InfoType>> {
    thread
        .sentences()
        .map(|s| s.labels.first().copied())
        .collect()
}
