//! Elliptic integral series and ansatz solving (placeholder during bring-up).
