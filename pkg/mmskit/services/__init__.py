"""Domain services: combinatorics, hypergraphs, k-sum analysis and friends."""
