//! Label embeddings, the cross-source similarity network and its
//! communities.

mod embeddings;
mod louvain;
mod network;
mod report;

pub use embeddings::{
    cosine, embed_uri, load_embeddings, tokenize, EmbeddingError, EmbeddingTable,
};
pub use louvain::{
    louvain, louvain_with_restarts, modularity, CommunityAssignment, DEFAULT_RESTARTS,
    KL_MAX_NODES, MIN_GAIN,
};
pub use network::{
    build_similarity_network, SimilarityEdge, SimilarityNetwork, SimilarityNode,
    DEFAULT_SIMILARITY_THRESHOLD,
};
pub use report::{
    community_report, CommunityReport, CommunityRow, DEFAULT_SIZE_FLOOR, STOP_WORDS, TOP_TOKENS,
};
