use crate::args::Format;

/// Ordered key/value results of one command.
#[derive(Default)]
pub struct Report {
    rows: Vec<(String, String)>,
}

impl Report {
    pub fn text(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.rows.push((key.into(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.text(key, format!("{value:.6}"))
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Kv => {
                for (k, v) in &self.rows {
                    out.push_str(&format!("{k}={v}\n"));
                }
            }
            Format::Table => {
                let w = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.rows {
                    out.push_str(&format!("{k:<w$}  {v}\n"));
                }
            }
        }
        out
    }
}
