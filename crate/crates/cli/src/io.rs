use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Why a subcommand stopped; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    pub fn config(e: impl Display) -> Self {
        Failure::Config(e.to_string())
    }

    pub fn runtime(e: impl Display) -> Self {
        Failure::Runtime(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Runtime(m) => write!(f, "runtime failure: {m}"),
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

/// Reads the JSON object at `path` (or starts empty), then lets flags override
/// keys before strict parsing, so unknown keys are rejected either way.
pub fn load_config<T: DeserializeOwned>(path: Option<&Path>, overrides: Map<String, Value>, seed: Option<u64>) -> Outcome<T> {
    let mut object = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Config(format!("cannot read config {}: {e}", p.display())))?;
            match serde_json::from_str::<Value>(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))? {
                Value::Object(m) => m,
                _ => return Err(Failure::Config(format!("{}: top level must be a JSON object", p.display()))),
            }
        }
        None => Map::new(),
    };
    object.extend(overrides);
    if let Some(s) = seed {
        object.insert("seed".into(), s.into());
    }
    serde_json::from_value(Value::Object(object)).map_err(Failure::config)
}

/// Writes every file of one run below `dir`; each file carries the command,
/// the resolved config and the seed.
pub struct OutputDir {
    dir: PathBuf,
    command: &'static str,
    config: Value,
    seed: u64,
}

impl OutputDir {
    pub fn create<C: Serialize>(dir: &Path, command: &'static str, config: &C, seed: u64) -> Outcome<Self> {
        fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        let config = serde_json::to_value(config).map_err(Failure::runtime)?;
        Ok(OutputDir { dir: dir.to_path_buf(), command, config, seed })
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Outcome<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
    }

    fn header_line(&self) -> String {
        format!("# ftqs {} seed={} config={}\n", self.command, self.seed, self.config)
    }

    /// JSON report: `command`, `config` and `seed` first, then the body's fields.
    pub fn json<B: Serialize>(&self, name: &str, body: &B) -> Outcome<()> {
        let mut top = Map::new();
        top.insert("command".into(), self.command.into());
        top.insert("config".into(), self.config.clone());
        top.insert("seed".into(), self.seed.into());
        match serde_json::to_value(body).map_err(Failure::runtime)? {
            Value::Object(m) => {
                for (k, v) in m {
                    if k != "config" && k != "seed" {
                        top.insert(k, v);
                    }
                }
            }
            other => {
                top.insert("result".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(top)).map_err(Failure::runtime)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// CSV or plain text produced by `fill`, behind one `#` header line.
    pub fn text<F>(&self, name: &str, fill: F) -> Outcome<()>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = self.header_line().into_bytes();
        fill(&mut buf).map_err(Failure::runtime)?;
        self.write(name, &buf)
    }

    /// JSON lines: a header object, then one line per item.
    pub fn jsonl<T: Serialize>(&self, name: &str, items: &[T]) -> Outcome<()> {
        let header = serde_json::json!({ "command": self.command, "config": self.config, "seed": self.seed });
        let mut text = header.to_string();
        text.push('\n');
        for item in items {
            text.push_str(&serde_json::to_string(item).map_err(Failure::runtime)?);
            text.push('\n');
        }
        self.write(name, text.as_bytes())
    }
}

/// `key=value` lines for the `--help` footer.
pub fn keys_help(keys: &[(&str, &str)]) -> String {
    let width = keys.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::from("Config keys (JSON object given by --config):\n");
    for (k, d) in keys {
        s.push_str(&format!("  {k:width$}  {d}\n"));
    }
    s
}
