"""wikinav: a goal-directed navigation benchmark over hyperlink graphs."""

from .benchmark import (
    BenchmarkConfig,
    BenchmarkReport,
    GameResult,
    derive_seed,
    render_report,
    run_benchmark,
    run_game,
    sample_goals,
)
from .centrality import (
    CentralityScores,
    betweenness_exact,
    betweenness_sampled,
    load_scores,
    save_scores,
    top_neighbor_by_centrality,
)
from .embeddings import (
    DistanceOracleProvider,
    EmbeddingProvider,
    FileEmbeddingProvider,
    HashEmbeddingProvider,
    RemoteEmbeddingProvider,
    best_semantic_neighbor,
    load_embeddings,
    save_embeddings,
    similarity,
)
from .errors import ConfigError, DeadEndError, FormatError, ProviderError
from .graph import (
    IdRemap,
    LinkGraph,
    NodeId,
    bfs_depths,
    bfs_shortest_path,
    k_ball_sample,
    prune_sinks,
    reachable_set,
)
from .ingest import (
    IngestStats,
    export_graphml,
    ingest_edge_list,
    load_graph,
    read_title_map,
    save_graph,
    write_title_map,
)
from .strategies import (
    DecisionTrace,
    NavigationState,
    StrategyKind,
    decide,
    llm_fallback_gate,
    make_strategy,
)

__version__ = "0.1.0"
