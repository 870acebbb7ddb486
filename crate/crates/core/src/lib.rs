//! Grammar-driven structure editing.
//!
//! A language is described declaratively (classes, productions, leaves,
//! pretty rules and sugar forms, see [`spec`]). From that description the
//! crate provides a typed document model with placeholders and completion
//! menus ([`ast`]), box layout for text and graphic views ([`layout`]),
//! concrete-syntax parsing with roundtrip analysis ([`syntax`]), text-mode
//! aliases ([`alias`]), a named document store ([`store`]) and an editing
//! session speaking a line-delimited JSON protocol ([`service`]).

pub mod alias;
pub mod ast;
pub mod generate;
pub mod layout;
pub mod service;
pub mod spec;
pub mod store;
pub mod syntax;

pub use spec::{builtin_demo_spec, parse_spec, validate_spec, GrammarSpec};
