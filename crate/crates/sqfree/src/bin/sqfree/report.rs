//! Machine-readable reports: one flat item list per command, emitted as JSON
//! (default) or CSV. Every numeric item carries either a point value, an
//! interval, or an exact count, plus a provenance string saying how it was
//! obtained.

use serde::Serialize;
use sqfree::interval::Interval;

#[derive(Serialize, Clone, Debug)]
pub struct Item {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub provenance: String,
}

impl Item {
    fn bare(name: impl Into<String>, provenance: impl Into<String>) -> Item {
        Item {
            name: name.into(),
            value: None,
            lower: None,
            upper: None,
            count: None,
            text: None,
            provenance: provenance.into(),
        }
    }

    pub fn value(name: impl Into<String>, v: f64, provenance: impl Into<String>) -> Item {
        Item {
            value: Some(v),
            ..Item::bare(name, provenance)
        }
    }

    pub fn interval(name: impl Into<String>, iv: Interval, provenance: impl Into<String>) -> Item {
        Item {
            lower: Some(iv.lo),
            upper: Some(iv.hi),
            ..Item::bare(name, provenance)
        }
    }

    pub fn count(name: impl Into<String>, c: u128, provenance: impl Into<String>) -> Item {
        Item {
            count: Some(c),
            ..Item::bare(name, provenance)
        }
    }

    pub fn text(
        name: impl Into<String>,
        t: impl Into<String>,
        provenance: impl Into<String>,
    ) -> Item {
        Item {
            text: Some(t.into()),
            ..Item::bare(name, provenance)
        }
    }
}

#[derive(Serialize, Debug)]
pub struct Meta {
    pub seconds: f64,
    pub threads: usize,
    pub seed: u64,
    pub version: &'static str,
}

#[derive(Serialize, Debug)]
pub struct Report {
    pub command: String,
    pub items: Vec<Item>,
    pub meta: Meta,
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,value,lower,upper,count,text,provenance\n");
        let fmt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        for it in &self.items {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                csv_quote(&it.name),
                fmt(it.value),
                fmt(it.lower),
                fmt(it.upper),
                it.count.map(|c| c.to_string()).unwrap_or_default(),
                csv_quote(it.text.as_deref().unwrap_or("")),
                csv_quote(&it.provenance),
            ));
        }
        out.push_str(&format!(
            "_meta,,,,,seconds={:.3} threads={} seed={} version={},\n",
            self.meta.seconds, self.meta.threads, self.meta.seed, self.meta.version
        ));
        out
    }
}
