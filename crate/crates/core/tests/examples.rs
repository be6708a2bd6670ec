// Compiles every example into this test binary and runs its `main`.

mod gradcheck {
    include!("../examples/gradcheck.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod pose_recognition {
    include!("../examples/pose_recognition.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod cross_pose {
    include!("../examples/cross_pose.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod video_recognition {
    include!("../examples/video_recognition.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod ablation {
    include!("../examples/ablation.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}

mod dataset_io {
    include!("../examples/dataset_io.rs");

    #[test]
    fn runs() {
        main().unwrap();
    }
}
