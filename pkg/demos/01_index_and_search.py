"""Index a few documents and rank them with random walk scores.

Run from the repository root:

    python demos/01_index_and_search.py
"""
from hgoe import CorpusDocument, NodeKind, RankingParams, index_corpus, map_query_to_seeds, rws

DOCS = [
    CorpusDocument("volcano-1", "Mount Etna erupted again this spring",
                   links=("Mount Etna", "Sicily")),
    CorpusDocument("volcano-2", "Lava flows on Etna threatened two villages",
                   links=("Mount Etna",)),
    CorpusDocument("travel-1", "Sicily is famous for beaches and seafood",
                   links=("Sicily",)),
    CorpusDocument("travel-2", "A week of seafood and markets in Palermo",
                   links=("Palermo", "Sicily")),
    CorpusDocument("cooking-1", "How to cook pasta alla norma at home", links=()),
]


def main():
    graph = index_corpus(DOCS)
    print(f"indexed {graph.doc_count} documents into "
          f"{len(graph.nodes)} nodes and {len(graph.edges)} edges")

    for query in ("etna eruption", "sicily seafood", "pasta"):
        seed_set = map_query_to_seeds(graph, query)
        seed_labels = [
            f"{graph.nodes[s].label} ({graph.nodes[s].kind.name.lower()})"
            for s in seed_set.seeds
        ]
        print(f"\nquery: {query!r}")
        print(f"  seeds: {', '.join(seed_labels) if seed_labels else '(none)'}")
        ranking = rws(graph, query, RankingParams(walk_length=2, repeats=2000))
        for rank, (doc_id, score) in enumerate(ranking.entries[:3], start=1):
            print(f"  {rank}. {doc_id:<10} {score:.4f}")

    # terms that name an entity expand to the entity node itself
    etna = graph.node_id(NodeKind.ENTITY, "Mount Etna")
    print(f"\n'etna' expands to entity node {etna}: "
          f"{map_query_to_seeds(graph, 'etna').seeds == (etna,)}")


if __name__ == "__main__":
    main()
