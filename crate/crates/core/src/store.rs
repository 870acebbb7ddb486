//! Named document store kept in a directory.
//!
//! ```text
//! <root>/<name>.ast   canonical AST text
//! <root>/<name>.txt   unparsed text, complete documents only
//! <root>/index        name<TAB>language<TAB>saved-at<TAB>has-text, one line per entry
//! <root>/lock         present while a writer is active
//! ```
//!
//! Every file is replaced by writing a temporary sibling and renaming it over
//! the old one, so an interrupted save leaves the previous entry intact. The
//! index can always be rebuilt from the `.ast` files.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use thiserror::Error;

use crate::ast::{read_doc, write_doc, AstDoc, AstTextError};
use crate::spec::GrammarSpec;
use crate::syntax::{parse_text, unparse, ParseError, UnparseError};

const INDEX: &str = "index";
const LOCK: &str = "lock";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid entry name {0:?}")]
    InvalidName(String),
    #[error("no entry named {0:?}")]
    UnknownName(String),
    #[error("store is locked by another writer ({0})")]
    Locked(PathBuf),
    #[error("entry {name:?} belongs to {found}, not {expected}")]
    WrongLanguage { name: String, expected: String, found: String },
    #[error("corrupt entry {name:?}: {source}")]
    Corrupt { name: String, source: AstTextError },
    #[error(transparent)]
    Text(#[from] AstTextError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Unparse(#[from] UnparseError),
    #[error("injected failure before rename of {0}")]
    Injected(PathBuf),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Index metadata of one entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StoreEntry {
    pub name: String,
    pub spec_name: String,
    pub saved_at: DateTime<Utc>,
    pub has_text: bool,
}

/// Both representations of an entry as stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredBlobs {
    pub ast_blob: String,
    pub text_repr: Option<String>,
}

/// Where a simulated crash interrupts a save.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// After the temporary `.ast` file is written, before it is renamed.
    BeforeRename,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FileForm {
    Ast,
    Text,
}

pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != "."
        && name != ".."
        && name.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-'))
}

#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    index: BTreeMap<String, StoreEntry>,
    fault: Option<Fault>,
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

impl Store {
    /// Opens (creating if needed) the store at `root`. A missing or stale
    /// index is rebuilt from the entry files.
    pub fn open(root: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        let mut store = Store { root, index: BTreeMap::new(), fault: None };
        store.index = match fs::read_to_string(store.root.join(INDEX)) {
            Ok(text) => parse_index(&text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        store.reconcile()?;
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Arms a simulated crash for the next save.
    pub fn inject_fault(&mut self, fault: Option<Fault>) {
        self.fault = fault;
    }

    /// Entry names in lexicographic order.
    pub fn list_entries(&self) -> Vec<String> {
        self.index.keys().cloned().collect()
    }

    pub fn entry(&self, name: &str) -> Option<&StoreEntry> {
        self.index.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Saves `doc` under `name`, replacing any entry of that name. The text
    /// representation is stored only for complete documents.
    pub fn save(&mut self, name: &str, doc: &AstDoc, spec: &GrammarSpec) -> Result<(), StoreError> {
        check_name(name)?;
        let _lock = self.lock()?;
        let text = if doc.is_complete() { Some(unparse(doc, spec)?) } else { None };
        let fault = self.fault.take();
        self.replace(&self.ast_path(name), &write_doc(doc), fault)?;
        match &text {
            Some(t) => self.replace(&self.txt_path(name), t, None)?,
            None => remove_if_present(&self.txt_path(name))?,
        }
        self.index.insert(
            name.to_string(),
            StoreEntry {
                name: name.to_string(),
                spec_name: spec.name.clone(),
                saved_at: Utc::now(),
                has_text: text.is_some(),
            },
        );
        self.write_index()
    }

    pub fn load(&self, name: &str, spec: &GrammarSpec) -> Result<AstDoc, StoreError> {
        let entry = self.index.get(name).ok_or_else(|| StoreError::UnknownName(name.to_string()))?;
        if !entry.spec_name.is_empty() && entry.spec_name != spec.name {
            return Err(StoreError::WrongLanguage {
                name: name.to_string(),
                expected: spec.name.clone(),
                found: entry.spec_name.clone(),
            });
        }
        let blob = fs::read_to_string(self.ast_path(name))?;
        read_doc(&blob, spec).map_err(|source| StoreError::Corrupt { name: name.to_string(), source })
    }

    pub fn blobs(&self, name: &str) -> Result<StoredBlobs, StoreError> {
        let entry = self.index.get(name).ok_or_else(|| StoreError::UnknownName(name.to_string()))?;
        let ast_blob = fs::read_to_string(self.ast_path(name))?;
        let text_repr = if entry.has_text { Some(fs::read_to_string(self.txt_path(name))?) } else { None };
        Ok(StoredBlobs { ast_blob, text_repr })
    }

    pub fn delete(&mut self, name: &str) -> Result<(), StoreError> {
        if !self.index.contains_key(name) {
            return Err(StoreError::UnknownName(name.to_string()));
        }
        let _lock = self.lock()?;
        remove_if_present(&self.ast_path(name))?;
        remove_if_present(&self.txt_path(name))?;
        self.index.remove(name);
        self.write_index()
    }

    /// Smallest `prog-N` (N ≥ 1) not in use.
    pub fn default_name(&self) -> String {
        (1..).map(|n| format!("prog-{n}")).find(|n| !self.index.contains_key(n)).expect("unbounded")
    }

    fn ast_path(&self, name: &str) -> PathBuf {
        self.root.join(format!("{name}.ast"))
    }

    fn txt_path(&self, name: &str) -> PathBuf {
        self.root.join(format!("{name}.txt"))
    }

    fn lock(&self) -> Result<LockGuard, StoreError> {
        let path = self.root.join(LOCK);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(LockGuard(path))
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => Err(StoreError::Locked(path)),
            Err(e) => Err(e.into()),
        }
    }

    fn replace(&self, path: &Path, contents: &str, fault: Option<Fault>) -> Result<(), StoreError> {
        let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or("entry");
        let tmp = self.root.join(format!(".{file_name}.tmp"));
        let mut f = File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        drop(f);
        if fault == Some(Fault::BeforeRename) {
            // The temporary file stays behind, as after a real crash.
            return Err(StoreError::Injected(path.to_path_buf()));
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    fn write_index(&self) -> Result<(), StoreError> {
        let mut text = String::new();
        for e in self.index.values() {
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                e.name,
                e.spec_name,
                e.saved_at.to_rfc3339_opts(SecondsFormat::Secs, true),
                if e.has_text { "text" } else { "-" }
            ));
        }
        self.replace(&self.root.join(INDEX), &text, None)
    }

    /// Drops index lines without an `.ast` file and adds files missing from
    /// the index.
    fn reconcile(&mut self) -> Result<(), StoreError> {
        let mut on_disk = BTreeMap::new();
        for item in fs::read_dir(&self.root)? {
            let path = item?.path();
            let Some(file) = path.file_name().and_then(|n| n.to_str()) else { continue };
            if let Some(name) = file.strip_suffix(".ast") {
                if valid_name(name) && !file.starts_with('.') {
                    on_disk.insert(name.to_string(), path.clone());
                }
            }
        }
        let before = self.index.len();
        self.index.retain(|name, _| on_disk.contains_key(name));
        let mut changed = before != self.index.len();
        for (name, path) in on_disk {
            if self.index.contains_key(&name) {
                continue;
            }
            let saved_at = fs::metadata(&path)?.modified().map(DateTime::<Utc>::from).unwrap_or_else(|_| Utc::now());
            let has_text = self.txt_path(&name).exists();
            // The language is unknown without an index line.
            self.index.insert(name.clone(), StoreEntry { name, spec_name: String::new(), saved_at, has_text });
            changed = true;
        }
        if changed && fs::metadata(self.root.join(LOCK)).is_err() {
            self.write_index()?;
        }
        Ok(())
    }
}

fn check_name(name: &str) -> Result<(), StoreError> {
    if valid_name(name) {
        Ok(())
    } else {
        Err(StoreError::InvalidName(name.to_string()))
    }
}

fn remove_if_present(path: &Path) -> Result<(), StoreError> {
    match fs::remove_file(path) {
        Err(e) if e.kind() != io::ErrorKind::NotFound => Err(e.into()),
        _ => Ok(()),
    }
}

fn parse_index(text: &str) -> BTreeMap<String, StoreEntry> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let fields: Vec<&str> = line.split('\t').collect();
        let [name, spec_name, saved_at, has_text] = fields.as_slice() else { continue };
        let Ok(saved_at) = DateTime::parse_from_rfc3339(saved_at) else { continue };
        if !valid_name(name) {
            continue;
        }
        out.insert(
            name.to_string(),
            StoreEntry {
                name: name.to_string(),
                spec_name: spec_name.to_string(),
                saved_at: saved_at.with_timezone(&Utc),
                has_text: *has_text == "text",
            },
        );
    }
    out
}

/// Writes `doc` to a plain file, as canonical AST text or as program text.
pub fn export_file(doc: &AstDoc, path: &Path, form: FileForm, spec: &GrammarSpec) -> Result<(), StoreError> {
    let contents = match form {
        FileForm::Ast => write_doc(doc),
        FileForm::Text => unparse(doc, spec)?,
    };
    fs::write(path, contents)?;
    Ok(())
}

pub fn import_file(path: &Path, form: FileForm, spec: &GrammarSpec) -> Result<AstDoc, StoreError> {
    let contents = fs::read_to_string(path)?;
    Ok(match form {
        FileForm::Ast => read_doc(&contents, spec)?,
        FileForm::Text => parse_text(spec, &contents)?.doc,
    })
}
