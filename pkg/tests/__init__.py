# Tests pour graded-sheaf-kit
