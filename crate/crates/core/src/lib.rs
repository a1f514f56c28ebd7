//! Compiler and product-line toolchain for a textual instructional-design
//! pattern language.
//!
//! Pipeline: [`dsl`] parses `.poid` sources into patterns and compositions,
//! [`repository`] collects them, [`composition`] resolves a composition,
//! enumerates its variants and instantiates one with a locale bundle,
//! [`validation`] checks the result, and [`codegen`] emits the course
//! package and a static HTML bundle.

pub mod codegen;
pub mod composition;
pub mod config;
pub mod dsl;
pub mod locale;
pub mod pattern;
pub mod report;
pub mod repository;
pub mod taxonomy;
pub mod validation;
