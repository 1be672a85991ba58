# Services package - graph model, temporal algebra, storage and analytics
