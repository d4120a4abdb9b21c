"""Complete minimal surfaces in H^2 x R built from Jenkins-Serrin graphs."""
