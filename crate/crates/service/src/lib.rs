//! Tile service: serves base-image tiles and feature tiles over HTTP.

pub mod config;
pub mod error;
pub mod routes;
pub mod state;

use std::sync::Arc;

pub use config::Config;
pub use error::{ServiceError, ServiceResult};
pub use routes::router;
pub use state::AppState;

/// Validates every source named by `config`, then serves until Ctrl-C.
pub async fn serve(config: Config) -> ServiceResult<()> {
    let state = Arc::new(AppState::from_config(&config)?);
    let listener = tokio::net::TcpListener::bind(&config.bind).await?;
    log::info!(
        "serving {} images and {} feature layers on {}",
        state.images.len(),
        state.features.len(),
        listener.local_addr()?
    );
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
