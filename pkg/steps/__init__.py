# Steps package - processing steps shared by the command pipelines
