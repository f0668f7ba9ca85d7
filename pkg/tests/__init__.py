# Tests for the order-flow memory analysis
