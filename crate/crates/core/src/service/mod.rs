//! Editing sessions driven by a line-delimited JSON protocol.
//!
//! A request is `{"id": 1, "op": "expand", "args": {...}}`, a response is
//! `{"id": 1, "status": "OK", "payload": ...}` or
//! `{"id": 1, "status": "ERR", "error": {"kind": "...", "message": "..."}}`.
//! Requests are handled strictly in order. A failing request leaves the
//! session as it was.
//!
//! Documents are addressed by handles `d1`, `d2`, ... and nodes by their
//! numeric ids. The cut buffer and alias table are shared by every document
//! of a session; each document keeps its own undo history of snapshots.

mod external;
mod protocol;

use std::collections::{BTreeMap, VecDeque};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::alias::{builtin_table, AliasError, AliasTable};
use crate::ast::{write_doc, AstDoc, AstError, CutBuffer, DisplayState, NodeId, Position, Scope};
use crate::layout::{layout_tree, pretty_print, LayoutError, LayoutMode, LayoutParams};
use crate::spec::GrammarSpec;
use crate::store::{Store, StoreError};
use crate::syntax::{parse_subtree, parse_text, roundtrip_check, unparse, RoundtripError, SubtreeError, UnparseError};

pub use external::{run_external, ExternalError};
pub use protocol::{handle_line, replay, serve_stream, ErrorBody, Request, Response, Status};

/// Snapshots kept per document.
pub const UNDO_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionConfig {
    pub tab_width: usize,
    pub layout: LayoutParams,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig { tab_width: crate::syntax::TAB_WIDTH, layout: LayoutParams::default() }
    }
}

#[derive(Debug, Clone)]
struct DocState {
    doc: AstDoc,
    undo: VecDeque<AstDoc>,
    /// Store name the document was last saved under or loaded from.
    name: Option<String>,
}

/// A failed operation: protocol error kind plus message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpError {
    pub kind: &'static str,
    pub message: String,
}

impl OpError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        OpError { kind, message: message.into() }
    }
}

impl From<AstError> for OpError {
    fn from(e: AstError) -> Self {
        let kind = match &e {
            AstError::UnknownNode(_) => "UNKNOWN_NODE",
            AstError::NotAPlaceholder(_) => "NOT_A_PLACEHOLDER",
            AstError::InvalidChoice { .. } => "INVALID_CHOICE",
            AstError::Lexical { .. } => "LEXICAL",
            AstError::NotATerminal(_) => "NOT_A_TERMINAL",
            AstError::EmptyBuffer => "EMPTY_BUFFER",
            AstError::TypeMismatch { .. } => "TYPE_MISMATCH",
            AstError::IsRoot => "IS_ROOT",
            AstError::InvalidTarget(..) => "INVALID_TARGET",
            AstError::InvalidSpec(_) => "INVALID_SPEC",
            AstError::WrongLanguage { .. } => "WRONG_LANGUAGE",
        };
        OpError::new(kind, e.to_string())
    }
}

impl From<LayoutError> for OpError {
    fn from(e: LayoutError) -> Self {
        match e {
            LayoutError::UnknownNode(_) => OpError::new("UNKNOWN_NODE", e.to_string()),
            other => OpError::new("LAYOUT", other.to_string()),
        }
    }
}

impl From<UnparseError> for OpError {
    fn from(e: UnparseError) -> Self {
        let kind = match e {
            UnparseError::Incomplete => "INCOMPLETE",
            UnparseError::NoRule(_) => "NO_RULE",
        };
        OpError::new(kind, e.to_string())
    }
}

impl From<SubtreeError> for OpError {
    fn from(e: SubtreeError) -> Self {
        match e {
            SubtreeError::Parse(p) => OpError::new("PARSE", p.to_string()),
            SubtreeError::ClassMismatch { .. } => OpError::new("TYPE_MISMATCH", e.to_string()),
            SubtreeError::Edit(a) => a.into(),
        }
    }
}

impl From<RoundtripError> for OpError {
    fn from(e: RoundtripError) -> Self {
        match e {
            RoundtripError::Parse(p) => OpError::new("PARSE", p.to_string()),
            RoundtripError::Unparse(u) => u.into(),
            RoundtripError::Canonical(_) => OpError::new("INTERNAL", e.to_string()),
        }
    }
}

impl From<AliasError> for OpError {
    fn from(e: AliasError) -> Self {
        match e {
            AliasError::Parse(p) => OpError::new("PARSE", p.to_string()),
            AliasError::Format(_) => OpError::new("ALIAS_FORMAT", e.to_string()),
        }
    }
}

impl From<StoreError> for OpError {
    fn from(e: StoreError) -> Self {
        let kind = match &e {
            StoreError::InvalidName(_) => "INVALID_NAME",
            StoreError::UnknownName(_) => "UNKNOWN_NAME",
            StoreError::Locked(_) => "LOCKED",
            StoreError::WrongLanguage { .. } => "WRONG_LANGUAGE",
            StoreError::Corrupt { .. } | StoreError::Text(_) => "CORRUPT",
            StoreError::Parse(_) => "PARSE",
            StoreError::Unparse(UnparseError::Incomplete) => "INCOMPLETE",
            StoreError::Unparse(_) => "NO_RULE",
            StoreError::Injected(_) | StoreError::Io(_) => "IO",
        };
        OpError::new(kind, e.to_string())
    }
}

impl From<ExternalError> for OpError {
    fn from(e: ExternalError) -> Self {
        match e {
            ExternalError::Incomplete(u) => u.into(),
            ExternalError::ExternalFailure { code, output } => OpError::new(
                "EXTERNAL_FAILURE",
                format!("command exited with {}: {output}", code.map_or("a signal".to_string(), |c| c.to_string())),
            ),
            ExternalError::Io(io) => OpError::new("IO", io.to_string()),
        }
    }
}

fn args<T: DeserializeOwned>(value: &Value) -> Result<T, OpError> {
    let value = if value.is_null() { json!({}) } else { value.clone() };
    serde_json::from_value(value).map_err(|e| OpError::new("PROTOCOL", format!("bad arguments: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocArg {
    doc: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeArg {
    doc: String,
    node: NodeId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OptNodeArg {
    doc: String,
    node: Option<NodeId>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpandArg {
    doc: String,
    node: NodeId,
    choice: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TextAtArg {
    doc: String,
    node: NodeId,
    text: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DisplayArg {
    doc: String,
    node: NodeId,
    state: DisplayState,
    #[serde(default = "simple")]
    scope: Scope,
}

fn simple() -> Scope {
    Scope::Simple
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CommentArg {
    doc: String,
    node: NodeId,
    position: Position,
    text: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutArg {
    doc: String,
    node: Option<NodeId>,
    mode: Option<LayoutMode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParseSubtreeArg {
    doc: String,
    node: NodeId,
    text: String,
    /// A dry run only reports errors.
    #[serde(default = "yes")]
    commit: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TextArg {
    text: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PrefixArg {
    prefix: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WordArg {
    word: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NameArg {
    name: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SaveArg {
    doc: String,
    name: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsArg {
    tab_width: Option<usize>,
    hspace: Option<i64>,
    vspace: Option<i64>,
    mode: Option<LayoutMode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExternalArg {
    template: Option<String>,
}

/// State of one editing session.
#[derive(Debug)]
pub struct Session {
    spec: GrammarSpec,
    config: SessionConfig,
    docs: BTreeMap<String, DocState>,
    next_doc: u64,
    cut_buffer: CutBuffer,
    aliases: AliasTable,
    store: Option<Store>,
    external: Option<String>,
    shut_down: bool,
}

impl Session {
    pub fn new(spec: GrammarSpec, store: Option<Store>, config: SessionConfig) -> Session {
        let aliases = builtin_table(&spec);
        Session {
            spec,
            config,
            docs: BTreeMap::new(),
            next_doc: 1,
            cut_buffer: CutBuffer::new(),
            aliases,
            store,
            external: None,
            shut_down: false,
        }
    }

    pub fn spec(&self) -> &GrammarSpec {
        &self.spec
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn doc(&self, handle: &str) -> Option<&AstDoc> {
        self.docs.get(handle).map(|d| &d.doc)
    }

    pub fn cut_buffer(&self) -> &CutBuffer {
        &self.cut_buffer
    }

    pub fn aliases(&self) -> &AliasTable {
        &self.aliases
    }

    pub fn store_mut(&mut self) -> Option<&mut Store> {
        self.store.as_mut()
    }

    pub fn is_shut_down(&self) -> bool {
        self.shut_down
    }

    /// Text rendering of everything a request can change, for comparing
    /// session states.
    pub fn fingerprint(&self) -> String {
        let mut out = String::new();
        for (handle, d) in &self.docs {
            out.push_str(&format!("{handle} {:?} undo={}\n{}", d.name, d.undo.len(), write_doc(&d.doc)));
        }
        out.push_str(&format!("buffer {:?}\n", self.cut_buffer.content().map(crate::ast::write_subtree)));
        out.push_str(&self.aliases.to_text());
        out.push_str(&format!("{:?} {:?} {}\n", self.config, self.external, self.next_doc));
        if let Some(store) = &self.store {
            out.push_str(&store.list_entries().join(","));
        }
        out
    }

    pub fn handle(&mut self, request: &Request) -> Response {
        match self.dispatch(&request.op, &request.args) {
            Ok(payload) => Response::ok(request.id, payload),
            Err(e) => Response::err(Some(request.id), e.kind, e.message),
        }
    }

    fn dispatch(&mut self, op: &str, a: &Value) -> Result<Value, OpError> {
        match op {
            "new_program" => {
                args::<BTreeMap<String, Value>>(a).and_then(no_fields)?;
                let doc = AstDoc::new_program(&self.spec)?;
                let geometry = layout_tree(&doc, doc.root(), &self.config.layout)?;
                let root = doc.root();
                let handle = self.open_doc(doc, None);
                Ok(json!({"doc": handle, "root": root, "geometry": geometry}))
            }
            "close" => {
                let a: DocArg = args(a)?;
                self.state(&a.doc)?;
                self.docs.remove(&a.doc);
                Ok(json!({}))
            }
            "tree" => {
                let a: DocArg = args(a)?;
                Ok(json!({"ast": write_doc(&self.state(&a.doc)?.doc)}))
            }
            "placeholders" => {
                let a: DocArg = args(a)?;
                Ok(json!({"nodes": self.state(&a.doc)?.doc.placeholders()}))
            }
            "list_completions" => {
                let a: NodeArg = args(a)?;
                let items = self.state(&a.doc)?.doc.list_completions(&self.spec, a.node)?;
                Ok(json!({"items": items}))
            }
            "expand" => {
                let a: ExpandArg = args(a)?;
                let node = self.edit(&a.doc, |doc, spec, _| Ok(doc.expand_placeholder(spec, a.node, &a.choice)?))?;
                Ok(json!({"node": node}))
            }
            "set_terminal" => {
                let a: TextAtArg = args(a)?;
                self.edit(&a.doc, |doc, spec, _| Ok(doc.set_terminal(spec, a.node, &a.text)?))?;
                self.aliases.learn_word(&a.text);
                Ok(json!({"node": a.node}))
            }
            "copy" => {
                let a: NodeArg = args(a)?;
                let mut buffer = self.cut_buffer.clone();
                self.state(&a.doc)?.doc.copy(a.node, &mut buffer)?;
                self.cut_buffer = buffer;
                Ok(json!({"type": self.cut_buffer.root_type()}))
            }
            "cut" => {
                let a: NodeArg = args(a)?;
                let removed = self.edit(&a.doc, |doc, spec, buffer| Ok(doc.cut(spec, a.node, buffer)?))?;
                Ok(json!({"at": removed.at, "dropped_comments": removed.dropped_comments}))
            }
            "paste" => {
                let a: NodeArg = args(a)?;
                let node = self.edit(&a.doc, |doc, spec, buffer| Ok(doc.paste(spec, a.node, buffer)?))?;
                Ok(json!({"node": node}))
            }
            "replace" => {
                let a: NodeArg = args(a)?;
                let node = self.edit(&a.doc, |doc, spec, buffer| Ok(doc.replace(spec, a.node, buffer)?))?;
                Ok(json!({"node": node}))
            }
            "collapse" => {
                let a: NodeArg = args(a)?;
                let removed = self.edit(&a.doc, |doc, spec, _| Ok(doc.collapse_to_placeholder(spec, a.node)?))?;
                Ok(json!({"at": removed.at, "dropped_comments": removed.dropped_comments}))
            }
            "set_display" => {
                let a: DisplayArg = args(a)?;
                self.edit(&a.doc, |doc, _, _| Ok(doc.set_display(a.node, a.state, a.scope)?))?;
                Ok(json!({"node": a.node}))
            }
            "attach_comment" => {
                let a: CommentArg = args(a)?;
                self.edit(&a.doc, |doc, _, _| Ok(doc.attach_comment(a.node, a.position, &a.text)?))?;
                Ok(json!({"node": a.node}))
            }
            "layout" => {
                let a: LayoutArg = args(a)?;
                let doc = &self.state(&a.doc)?.doc;
                let mut params = self.config.layout;
                if let Some(mode) = a.mode {
                    params.mode = mode;
                }
                Ok(serde_json::to_value(layout_tree(doc, a.node.unwrap_or(doc.root()), &params)?).expect("geometry"))
            }
            "pretty" => {
                let a: OptNodeArg = args(a)?;
                let doc = &self.state(&a.doc)?.doc;
                let text = pretty_print(doc, a.node.unwrap_or(doc.root()), &self.spec, self.config.tab_width)?;
                Ok(json!({"text": text}))
            }
            "unparse" => {
                let a: DocArg = args(a)?;
                Ok(json!({"text": unparse(&self.state(&a.doc)?.doc, &self.spec)?}))
            }
            "parse" => {
                let a: TextArg = args(a)?;
                let outcome = parse_text(&self.spec, &a.text).map_err(|e| OpError::new("PARSE", e.to_string()))?;
                let root = outcome.doc.root();
                let handle = self.open_doc(outcome.doc, None);
                Ok(json!({"doc": handle, "root": root, "sugar": outcome.sugar_events}))
            }
            "parse_subtree" => {
                let a: ParseSubtreeArg = args(a)?;
                let mut doc = self.state(&a.doc)?.doc.clone();
                let outcome = parse_subtree(&self.spec, &mut doc, a.node, &a.text)?;
                if a.commit {
                    self.commit(&a.doc, doc);
                }
                Ok(json!({"node": outcome.node, "sugar": outcome.sugar_events, "committed": a.commit}))
            }
            "roundtrip" => {
                let a: TextArg = args(a)?;
                Ok(serde_json::to_value(roundtrip_check(&self.spec, &a.text)?).expect("report"))
            }
            "alias_expand" => {
                let a: PrefixArg = args(a)?;
                if a.prefix.is_empty() {
                    return Err(OpError::new("PROTOCOL", "empty prefix"));
                }
                Ok(serde_json::to_value(self.aliases.expand_prefix(&a.prefix)).expect("expansion"))
            }
            "alias_learn" => {
                let a: WordArg = args(a)?;
                Ok(json!({"added": self.aliases.learn_word(&a.word)}))
            }
            "alias_import" => {
                let a: TextArg = args(a)?;
                let mut table = self.aliases.clone();
                let added = table.import_module_aliases(&a.text, &self.spec)?;
                self.aliases = table;
                Ok(json!({"added": added}))
            }
            "alias_list" => Ok(json!({"entries": self.aliases.entries().collect::<Vec<_>>()})),
            "store_list" => Ok(json!({"names": self.store()?.list_entries()})),
            "store_default_name" => Ok(json!({"name": self.store()?.default_name()})),
            "store_save" => {
                let a: SaveArg = args(a)?;
                let state = self.state(&a.doc)?;
                let name = match a.name.or_else(|| state.name.clone()) {
                    Some(n) => n,
                    None => self.store()?.default_name(),
                };
                let doc = state.doc.clone();
                let spec = self.spec.clone();
                self.store_mut_checked()?.save(&name, &doc, &spec)?;
                self.docs.get_mut(&a.doc).expect("checked").name = Some(name.clone());
                Ok(json!({"name": name}))
            }
            "store_load" => {
                let a: NameArg = args(a)?;
                let doc = self.store()?.load(&a.name, &self.spec)?;
                let root = doc.root();
                let handle = self.open_doc(doc, Some(a.name));
                Ok(json!({"doc": handle, "root": root}))
            }
            "store_delete" => {
                let a: NameArg = args(a)?;
                self.store_mut_checked()?.delete(&a.name)?;
                Ok(json!({}))
            }
            "undo" => {
                let a: DocArg = args(a)?;
                let state = self.docs.get_mut(&a.doc).ok_or_else(|| unknown_doc(&a.doc))?;
                let previous = state.undo.pop_back().ok_or_else(|| OpError::new("NOTHING_TO_UNDO", "nothing to undo"))?;
                state.doc = previous;
                Ok(json!({"remaining": state.undo.len()}))
            }
            "set_params" => {
                let a: ParamsArg = args(a)?;
                let mut config = self.config;
                if let Some(t) = a.tab_width {
                    config.tab_width = t;
                }
                if let Some(h) = a.hspace {
                    config.layout.hspace = h;
                }
                if let Some(v) = a.vspace {
                    config.layout.vspace = v;
                }
                if let Some(m) = a.mode {
                    config.layout.mode = m;
                }
                if config.layout.hspace < 0 || config.layout.vspace < 0 || config.tab_width > 16 {
                    return Err(OpError::new("PROTOCOL", "spacing out of range"));
                }
                self.config = config;
                Ok(json!({"tab_width": config.tab_width, "layout": config.layout}))
            }
            "set_external" => {
                let a: ExternalArg = args(a)?;
                self.external = a.template;
                Ok(json!({}))
            }
            "run" => {
                let a: DocArg = args(a)?;
                let template = self.external.clone().ok_or_else(|| OpError::new("NO_EXTERNAL", "no external command set"))?;
                let output = run_external(&self.state(&a.doc)?.doc, &self.spec, &template)?;
                Ok(json!({"output": output}))
            }
            "shutdown" => {
                self.shut_down = true;
                Ok(json!({}))
            }
            other => Err(OpError::new("PROTOCOL", format!("unknown op {other:?}"))),
        }
    }

    fn open_doc(&mut self, doc: AstDoc, name: Option<String>) -> String {
        let handle = format!("d{}", self.next_doc);
        self.next_doc += 1;
        self.docs.insert(handle.clone(), DocState { doc, undo: VecDeque::new(), name });
        handle
    }

    fn state(&self, handle: &str) -> Result<&DocState, OpError> {
        self.docs.get(handle).ok_or_else(|| unknown_doc(handle))
    }

    fn store(&self) -> Result<&Store, OpError> {
        self.store.as_ref().ok_or_else(|| OpError::new("NO_STORE", "the session has no store"))
    }

    fn store_mut_checked(&mut self) -> Result<&mut Store, OpError> {
        self.store.as_mut().ok_or_else(|| OpError::new("NO_STORE", "the session has no store"))
    }

    /// Runs `f` on copies of the document and cut buffer and keeps the
    /// result only if it succeeds.
    fn edit<T>(
        &mut self,
        handle: &str,
        f: impl FnOnce(&mut AstDoc, &GrammarSpec, &mut CutBuffer) -> Result<T, OpError>,
    ) -> Result<T, OpError> {
        let mut doc = self.state(handle)?.doc.clone();
        let mut buffer = self.cut_buffer.clone();
        let out = f(&mut doc, &self.spec, &mut buffer)?;
        self.cut_buffer = buffer;
        self.commit(handle, doc);
        Ok(out)
    }

    fn commit(&mut self, handle: &str, doc: AstDoc) {
        let state = self.docs.get_mut(handle).expect("caller checked the handle");
        if state.doc == doc {
            return;
        }
        let previous = std::mem::replace(&mut state.doc, doc);
        state.undo.push_back(previous);
        if state.undo.len() > UNDO_DEPTH {
            state.undo.pop_front();
        }
    }
}

fn unknown_doc(handle: &str) -> OpError {
    OpError::new("UNKNOWN_DOC", format!("no document {handle:?}"))
}

fn no_fields(map: BTreeMap<String, Value>) -> Result<(), OpError> {
    match map.keys().next() {
        None => Ok(()),
        Some(k) => Err(OpError::new("PROTOCOL", format!("bad arguments: unexpected field {k:?}"))),
    }
}

#[cfg(test)]
mod tests;
