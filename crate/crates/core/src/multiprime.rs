//! Multi-prime reconstruction (placeholder during bring-up).
