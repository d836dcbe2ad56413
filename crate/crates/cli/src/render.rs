use juhl_kit::Rational;
use serde::Serialize;

pub const SCHEMA: &str = "juhl-kit/1";

pub fn rational(q: &Rational) -> String {
    q.to_string()
}

pub fn parts(p: &[u32]) -> String {
    let inner: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("({})", inner.join(","))
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn tsv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}
