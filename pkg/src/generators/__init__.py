# Test Generators Package